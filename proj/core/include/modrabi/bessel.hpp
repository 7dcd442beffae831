#pragma once

namespace modrabi {

/// Largest |x| for which bessel_j is validated.
inline constexpr double kBesselMaxArgument = 50.0;

/// First positive zero of J_0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695772768621631879;

/// Bessel function of the first kind J_n(x) for integer n ≥ 0, |x| ≤ 50.
///
/// |x| ≤ 12 sums the ascending power series in extended precision until terms
/// fall below 1e-15 of the running sum; larger |x| uses Miller's downward
/// recurrence normalized by J_0 + 2 Σ J_2k = 1. Throws std::domain_error
/// outside the validated range or for negative n.
double bessel_j(int n, double x);

/// J_n(x) for any integer n, using J_{-n}(x) = (-1)^n J_n(x).
double bessel_j_signed(int n, double x);

}  // namespace modrabi
