#include "modrabi/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modrabi/bessel.hpp"
#include "modrabi/errors.hpp"

namespace modrabi::modulation {
namespace {

void require_finite_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError(std::string(name) + " must be finite and >= 0");
  }
}

// r(η) = J₁(2η) / J₀(2η) expressed without the division.
double ratio_residual(double eta, double target_ratio) {
  return bessel_j(1, 2.0 * eta) - target_ratio * bessel_j(0, 2.0 * eta);
}

double ratio_of(double eta) { return bessel_j(1, 2.0 * eta) / bessel_j(0, 2.0 * eta); }

double solve_ratio(double target_ratio) {
  if (target_ratio == 0.0) return 0.0;
  if (std::isinf(target_ratio)) return kMaxEta;
  double lo = 0.0;
  double hi = kMaxEta;
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (ratio_residual(mid, target_ratio) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void SystemParams::validate() const {
  require_finite_nonnegative(epsilon, "system.epsilon");
  require_finite_nonnegative(omega, "system.omega");
  require_finite_nonnegative(g, "system.g");
  require_finite_nonnegative(kappa, "system.kappa");
  require_finite_nonnegative(gamma, "system.gamma");
  if (epsilon == omega) throw ValidationError("system: epsilon must differ from omega");
}

SystemParams SystemParams::circuit_qed_reference() {
  return SystemParams{ghz(5.4), ghz(2.2), mhz(70.0), khz(50.0), khz(12.0)};
}

void DriveParams::validate() const {
  if (!std::isfinite(omega1) || omega1 <= 0.0) throw ValidationError("drive.omega1 must be > 0");
  if (!std::isfinite(omega2) || omega2 <= 0.0) throw ValidationError("drive.omega2 must be > 0");
  require_finite_nonnegative(eta1, "drive.eta1");
  require_finite_nonnegative(eta2, "drive.eta2");
  if (2.0 * std::max(eta1, eta2) > 50.0) throw ValidationError("drive: eta must be <= 25");
  if (!std::isfinite(phi1) || !std::isfinite(phi2)) throw ValidationError("drive phases must be finite");
}

Detunings detunings(const SystemParams& sys, const DriveParams& drive) {
  Detunings d;
  d.delta_minus = sys.epsilon - sys.omega;
  d.delta_plus = sys.epsilon + sys.omega;
  d.delta1 = drive.omega1 - d.delta_minus;
  d.delta2 = d.delta_plus - drive.omega2;
  return d;
}

double EffectiveParams::rt_ratio() const noexcept {
  return omega_eff == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(g_r / omega_eff);
}

double EffectiveParams::crt_ratio() const noexcept {
  return omega_eff == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(g_cr / omega_eff);
}

EffectiveParams effective_params(const SystemParams& sys, const DriveParams& drive) {
  const Detunings d = detunings(sys, drive);
  const double j0_1 = bessel_j(0, 2.0 * drive.eta1);
  const double j1_1 = bessel_j(1, 2.0 * drive.eta1);
  const double j0_2 = bessel_j(0, 2.0 * drive.eta2);
  const double j1_2 = bessel_j(1, 2.0 * drive.eta2);

  EffectiveParams eff;
  eff.g_r = -sys.g * j1_1 * j0_2;
  eff.g_cr = -sys.g * j0_1 * j1_2;
  eff.omega_eff = 0.5 * (d.delta1 + d.delta2);
  eff.epsilon_eff = 0.5 * (d.delta2 - d.delta1);
  eff.phi1 = drive.phi1;
  eff.phi2 = drive.phi2;
  eff.theta = drive.phi1 == 0.0 ? drive.phi2 : drive.phi1 + drive.phi2;
  eff.lambda = eff.g_cr / eff.g_r;
  return eff;
}

// ---- sideband series ---------------------------------------------------------

namespace {
Complex evaluate_series(const std::vector<SidebandTerm>& terms, double t) {
  Complex sum = 0.0;
  for (const auto& term : terms) sum += term.coefficient * std::exp(kI * (term.frequency * t));
  return sum;
}

const SidebandTerm& find_term(const std::vector<SidebandTerm>& terms, int n1, int n2) {
  for (const auto& term : terms) {
    if (term.n1 == n1 && term.n2 == n2) return term;
  }
  throw ValidationError("sideband term not present in the truncated series");
}
}  // namespace

Complex SidebandSeries::alpha_at(double t) const { return evaluate_series(alpha, t); }
Complex SidebandSeries::beta_at(double t) const { return evaluate_series(beta, t); }
const SidebandTerm& SidebandSeries::dominant_alpha() const { return find_term(alpha, -1, 0); }
const SidebandTerm& SidebandSeries::dominant_beta() const { return find_term(beta, 0, -1); }

double SidebandSeries::alpha_weight() const {
  double sum = 0.0;
  for (const auto& term : alpha) sum += std::norm(term.coefficient);
  return sum;
}

SidebandSeries sideband_amplitudes(const DriveParams& drive, const Detunings& det, int truncation) {
  if (truncation < 1) throw ValidationError("sideband_amplitudes: truncation must be >= 1");
  SidebandSeries series;
  series.truncation = truncation;
  const int width = 2 * truncation + 1;
  series.alpha.reserve(static_cast<std::size_t>(width * width));
  series.beta.reserve(static_cast<std::size_t>(width * width));
  for (int n1 = -truncation; n1 <= truncation; ++n1) {
    const double j1 = bessel_j_signed(n1, 2.0 * drive.eta1);
    for (int n2 = -truncation; n2 <= truncation; ++n2) {
      const double weight = j1 * bessel_j_signed(n2, 2.0 * drive.eta2);
      const double phase = n1 * drive.phi1 + n2 * drive.phi2;
      const double shift = n1 * drive.omega1 + n2 * drive.omega2;
      series.alpha.push_back({n1, n2, weight * std::exp(kI * phase), det.delta_minus + shift});
      series.beta.push_back({n1, n2, weight * std::exp(-kI * phase), -(det.delta_plus + shift)});
    }
  }
  return series;
}

// ---- validity audit -------------------------------------------------------------

ValidityReport validity_report(const SystemParams& sys, const DriveParams& drive,
                               const ValidityThresholds& thresholds) {
  if (!(thresholds.rwa_margin > 1.0)) throw ValidationError("validity thresholds: rwa_margin must be > 1");
  if (!(thresholds.dispersive_ratio > 0.0) || !(thresholds.detuning_ratio > 0.0)) {
    throw ValidationError("validity thresholds: ratios must be > 0");
  }
  if (thresholds.window < 1) throw ValidationError("validity thresholds: window must be >= 1");

  const Detunings d = detunings(sys, drive);
  ValidityReport report;
  report.thresholds = thresholds;
  report.dispersive_ratio = std::max(std::abs(sys.g / d.delta_minus), std::abs(sys.g / d.delta_plus));
  report.detuning_ratio = std::max(std::abs(d.delta1 / d.delta_minus), std::abs(d.delta2 / d.delta_plus));

  report.rwa_margin = std::numeric_limits<double>::infinity();
  const int w = thresholds.window;
  for (int n1 = -w; n1 <= w; ++n1) {
    const double j1 = bessel_j_signed(n1, 2.0 * drive.eta1);
    for (int n2 = -w; n2 <= w; ++n2) {
      const double coupling = std::abs(sys.g * j1 * bessel_j_signed(n2, 2.0 * drive.eta2));
      if (coupling == 0.0) continue;
      const double shift = n1 * drive.omega1 + n2 * drive.omega2;
      if (!(n1 == -1 && n2 == 0)) {
        const double margin = std::abs(d.delta_minus + shift) / coupling;
        if (margin < report.rwa_margin) {
          report.rwa_margin = margin;
          report.worst_n1 = n1;
          report.worst_n2 = n2;
          report.worst_family = 'a';
        }
      }
      if (!(n1 == 0 && n2 == -1)) {
        const double margin = std::abs(d.delta_plus + shift) / coupling;
        if (margin < report.rwa_margin) {
          report.rwa_margin = margin;
          report.worst_n1 = n1;
          report.worst_n2 = n2;
          report.worst_family = 'b';
        }
      }
    }
  }

  report.dispersive_pass = report.dispersive_ratio < thresholds.dispersive_ratio;
  report.detuning_pass = report.detuning_ratio < thresholds.detuning_ratio;
  report.rwa_pass = report.rwa_margin >= thresholds.rwa_margin;
  return report;
}

// ---- inverse solver --------------------------------------------------------------

AmplitudeSolution solve_amplitudes(double target_lambda, TunedSideband tuned, double anchor) {
  if (std::isnan(target_lambda) || target_lambda < 0.0) {
    throw UnreachableTarget("solve_amplitudes: lambda must be >= 0");
  }
  if (!(anchor > 0.0) || !(anchor < kMaxEta)) {
    throw UnreachableTarget("solve_amplitudes: anchor eta must lie in (0, " + std::to_string(kMaxEta) + ")");
  }

  AmplitudeSolution out;
  const double anchor_ratio = ratio_of(anchor);
  if (target_lambda == 1.0) {
    out.eta1 = anchor;
    out.eta2 = anchor;
  } else if (tuned == TunedSideband::Blue) {
    out.eta1 = anchor;
    out.eta2 = solve_ratio(target_lambda * anchor_ratio);
  } else {
    out.eta2 = anchor;
    out.eta1 = solve_ratio(std::isinf(target_lambda) ? 0.0 : anchor_ratio / target_lambda);
  }

  const double numerator = bessel_j(0, 2.0 * out.eta1) * bessel_j(1, 2.0 * out.eta2);
  const double denominator = bessel_j(1, 2.0 * out.eta1) * bessel_j(0, 2.0 * out.eta2);
  if (target_lambda <= 1.0) {
    out.residual = std::abs(numerator / denominator - target_lambda);
  } else {
    const double inverse_target = std::isinf(target_lambda) ? 0.0 : 1.0 / target_lambda;
    out.residual = std::abs(denominator / numerator - inverse_target);
  }
  if (!(out.residual < 1e-9)) {
    throw UnreachableTarget("solve_amplitudes: lambda " + std::to_string(target_lambda) +
                            " not reached (residual " + std::to_string(out.residual) + ")");
  }
  return out;
}

}  // namespace modrabi::modulation
