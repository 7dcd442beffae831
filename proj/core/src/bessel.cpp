#include "modrabi/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace modrabi {
namespace {

constexpr double kSeriesLimit = 12.0;

double series(int n, double x) {
  using Real = long double;
  const Real half = static_cast<Real>(x) / 2;
  const Real half_sq = half * half;
  // leading term (x/2)^n / n!
  Real term = 1;
  for (int k = 1; k <= n; ++k) term *= half / k;
  Real sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= -half_sq / (static_cast<Real>(k) * static_cast<Real>(k + n));
    sum += term;
    if (k > half && std::fabs(term) <= 1e-15L * std::fabs(sum)) break;
    if (std::fabs(term) < 1e-300L) break;
  }
  return static_cast<double>(sum);
}

double miller(int n, double x) {
  // Start well above both n and x so the minimal solution dominates.
  const int start = 2 * ((std::max(n, static_cast<int>(x)) + 30 + static_cast<int>(std::sqrt(40.0 * std::max(n, static_cast<int>(x))))) / 2);
  std::vector<double> values(start + 2, 0.0);
  double next = 0.0;
  double current = 1e-30;
  double norm = 0.0;
  for (int k = start; k >= 0; --k) {
    values[k] = current;
    if (k % 2 == 0) norm += (k == 0 ? 1.0 : 2.0) * current;
    const double previous = (k == 0) ? 0.0 : (2.0 * k / x) * current - next;
    next = current;
    current = previous;
    if (std::fabs(current) > 1e250) {
      for (int j = k; j <= start; ++j) values[j] *= 1e-250;
      next *= 1e-250;
      current *= 1e-250;
      norm *= 1e-250;
    }
  }
  return values[n] / norm;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) throw std::domain_error("bessel_j: order must be non-negative");
  if (!std::isfinite(x) || std::fabs(x) > kBesselMaxArgument) {
    throw std::domain_error("bessel_j: |x| = " + std::to_string(x) + " outside validated range");
  }
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double sign = (x < 0.0 && (n % 2 != 0)) ? -1.0 : 1.0;
  const double ax = std::fabs(x);
  return sign * (ax <= kSeriesLimit ? series(n, ax) : miller(n, ax));
}

double bessel_j_signed(int n, double x) {
  if (n >= 0) return bessel_j(n, x);
  const double value = bessel_j(-n, x);
  return (n % 2 == 0) ? value : -value;
}

}  // namespace modrabi
