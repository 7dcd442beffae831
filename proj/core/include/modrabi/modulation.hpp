#pragma once

// Two-tone frequency modulation of a dispersively coupled qubit-resonator
// pair: forward map from drive parameters to the effective anisotropic Rabi
// parameters, the Jacobi–Anger sideband series, the approximation audit and
// the inverse amplitude solver.
//
// All frequencies and rates are angular (rad/s). Δ₋ is stored as ε − ω, the
// sign under which the red sideband Ω₁ = ε − ω is resonant (δ₁ = 0).

#include <numbers>
#include <utility>
#include <vector>

#include "modrabi/linalg.hpp"

namespace modrabi::modulation {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
constexpr double angular(double hertz) { return kTwoPi * hertz; }
constexpr double ghz(double value) { return angular(value * 1e9); }
constexpr double mhz(double value) { return angular(value * 1e6); }
constexpr double khz(double value) { return angular(value * 1e3); }

/// Normalized amplitude at which both sidebands give equal RT and CRT weight.
inline constexpr double kBalancedEta = 0.7173;
/// η at which J₀(2η) = 0 (upper end of the monotone search domain).
inline constexpr double kMaxEta = 1.2024127788478864;

struct SystemParams {
  double epsilon = 0.0;  ///< qubit transition frequency ε
  double omega = 0.0;    ///< resonator frequency ω
  double g = 0.0;        ///< qubit–resonator coupling
  double kappa = 0.0;    ///< qubit decay rate
  double gamma = 0.0;    ///< resonator loss rate

  /// Throws ValidationError on negative/non-finite values or ε = ω.
  void validate() const;

  /// ε = 2π·5.4 GHz, ω = 2π·2.2 GHz, g = 2π·70 MHz, κ = 2π·50 kHz, γ = 2π·12 kHz.
  static SystemParams circuit_qed_reference();
};

struct DriveParams {
  double omega1 = 0.0;  ///< red-sideband drive frequency Ω₁
  double omega2 = 0.0;  ///< blue-sideband drive frequency Ω₂
  double eta1 = 0.0;    ///< normalized amplitude η₁ (dimensionless)
  double eta2 = 0.0;
  double phi1 = 0.0;  ///< initial phases (rad)
  double phi2 = 0.0;

  void validate() const;
};

struct Detunings {
  double delta1 = 0.0;       ///< δ₁ = Ω₁ − Δ₋
  double delta2 = 0.0;       ///< δ₂ = Δ₊ − Ω₂
  double delta_minus = 0.0;  ///< Δ₋ = ε − ω
  double delta_plus = 0.0;   ///< Δ₊ = ε + ω
};

Detunings detunings(const SystemParams& sys, const DriveParams& drive);

struct EffectiveParams {
  double g_r = 0.0;          ///< rotating-term coupling −g J₁(2η₁) J₀(2η₂)
  double g_cr = 0.0;         ///< counter-rotating coupling −g J₀(2η₁) J₁(2η₂)
  double omega_eff = 0.0;    ///< (δ₁ + δ₂) / 2
  double epsilon_eff = 0.0;  ///< (δ₂ − δ₁) / 2
  double phi1 = 0.0;         ///< phase carried by the RT term, a σ₊ e^{-iφ₁}
  double phi2 = 0.0;         ///< phase carried by the CRT term, a σ₋ e^{+iφ₂}
  double theta = 0.0;        ///< φ₂ when φ₁ = 0; φ₁ + φ₂ otherwise
  double lambda = 0.0;       ///< g_cr / g_r (±∞ when g_r = 0, NaN when both vanish)

  double delta1() const noexcept { return omega_eff - epsilon_eff; }
  double delta2() const noexcept { return omega_eff + epsilon_eff; }
  /// |g_r / ω̃|, +∞ when ω̃ = 0.
  double rt_ratio() const noexcept;
  /// |g_cr / ω̃|, +∞ when ω̃ = 0.
  double crt_ratio() const noexcept;
};

EffectiveParams effective_params(const SystemParams& sys, const DriveParams& drive);

/// One term c · e^{i·frequency·t} of a Jacobi–Anger double series.
struct SidebandTerm {
  int n1 = 0;
  int n2 = 0;
  Complex coefficient;
  double frequency = 0.0;
};

/// α(t) multiplies g a σ₊ and β(t) multiplies g a σ₋ in the first rotating
/// frame. Terms carry their signed rate: α uses +Ω₋(n₁,n₂), β uses −Ω₊(n₁,n₂),
/// with Ω±(n₁,n₂) = Δ± + n₁Ω₁ + n₂Ω₂.
struct SidebandSeries {
  int truncation = 0;
  std::vector<SidebandTerm> alpha;
  std::vector<SidebandTerm> beta;

  Complex alpha_at(double t) const;
  Complex beta_at(double t) const;
  /// The retained near-resonant terms: α at (−1, 0), β at (0, −1).
  const SidebandTerm& dominant_alpha() const;
  const SidebandTerm& dominant_beta() const;
  /// Σ |coef|² over the α series (→ 1 as truncation grows).
  double alpha_weight() const;
};

/// Both series with |n₁|, |n₂| ≤ truncation (≥ 1).
SidebandSeries sideband_amplitudes(const DriveParams& drive, const Detunings& det, int truncation);

struct ValidityThresholds {
  double dispersive_ratio = 0.1;  ///< pass when max |g/Δ±| < this
  double detuning_ratio = 0.2;    ///< pass when max(|δ₁/Δ₋|, |δ₂/Δ₊|) < this
  double rwa_margin = 10.0;       ///< pass when every rejected term has |Ω±| / |g J J| ≥ this
  int window = 5;                 ///< sideband indices audited, |nᵢ| ≤ window
};

struct ValidityReport {
  double dispersive_ratio = 0.0;
  double detuning_ratio = 0.0;
  double rwa_margin = 0.0;
  /// Indices and family ('a' for α, 'b' for β) of the term setting rwa_margin.
  int worst_n1 = 0;
  int worst_n2 = 0;
  char worst_family = 'a';
  bool dispersive_pass = false;
  bool detuning_pass = false;
  bool rwa_pass = false;
  ValidityThresholds thresholds;

  bool pass() const noexcept { return dispersive_pass && detuning_pass && rwa_pass; }
};

ValidityReport validity_report(const SystemParams& sys, const DriveParams& drive,
                               const ValidityThresholds& thresholds = {});

/// Which amplitude the inverse solver tunes; the other stays at the anchor.
enum class TunedSideband {
  Blue,  ///< keep η₁ = anchor, solve η₂: λ = 0 → η₂ = 0, λ = ∞ → η₂ = kMaxEta
  Red,   ///< keep η₂ = anchor, solve η₁: λ = 0 → η₁ = kMaxEta, λ = ∞ → η₁ = 0
};

struct AmplitudeSolution {
  double eta1 = 0.0;
  double eta2 = 0.0;
  /// |achieved − target| for λ ≤ 1, |1/achieved − 1/target| otherwise.
  double residual = 0.0;
};

/// Amplitudes (η₁, η₂) in [0, kMaxEta] realizing g_cr / g_r = target_lambda.
/// Uses bisection on J₁(2η) − r·J₀(2η), which is increasing on the domain.
/// Throws UnreachableTarget for negative/NaN targets or an anchor outside the
/// domain; λ = 1 returns (anchor, anchor).
AmplitudeSolution solve_amplitudes(double target_lambda, TunedSideband tuned = TunedSideband::Blue,
                                   double anchor = kBalancedEta);

}  // namespace modrabi::modulation
