#include "integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modrabi/errors.hpp"

namespace modrabi::dynamics::detail {
namespace {

Index find_slot(const SparseMatrix& m, Index row, Index col) {
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  const auto* begin = inner + outer[row];
  const auto* end = inner + outer[row + 1];
  const auto* it = std::lower_bound(begin, end, static_cast<SparseMatrix::StorageIndex>(col));
  return static_cast<Index>(it - inner);
}

using Triplet = Eigen::Triplet<Complex, SparseMatrix::StorageIndex>;

template <class F>
void for_each_nonzero(const Matrix& m, F&& f) {
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) != Complex(0.0)) f(r, c, m(r, c));
    }
  }
}

}  // namespace

CompiledOperator::CompiledOperator(const TimeDependentHamiltonian& h, const Matrix* constant_extra) {
  const Index n = h.space().dim();
  std::vector<Triplet> pattern;
  const auto collect = [&pattern](const Matrix& m, bool transpose) {
    for_each_nonzero(m, [&](Index r, Index c, Complex) {
      pattern.emplace_back(static_cast<int>(transpose ? c : r), static_cast<int>(transpose ? r : c), Complex(1.0));
    });
  };
  for (const auto& term : h.terms()) {
    collect(term.op.matrix(), false);
    if (term.hermitian_pair) collect(term.op.matrix(), true);
  }
  if (constant_extra != nullptr) collect(*constant_extra, false);

  matrix_.resize(n, n);
  matrix_.setFromTriplets(pattern.begin(), pattern.end());
  matrix_.makeCompressed();
  constant_values_.assign(static_cast<std::size_t>(matrix_.nonZeros()), Complex(0.0));

  const auto add_constant = [this](const Matrix& m, Complex scale, bool transpose) {
    for_each_nonzero(m, [&](Index r, Index c, Complex v) {
      const Index slot = transpose ? find_slot(matrix_, c, r) : find_slot(matrix_, r, c);
      constant_values_[static_cast<std::size_t>(slot)] += transpose ? scale * std::conj(v) : scale * v;
    });
  };

  for (const auto& term : h.terms()) {
    if (!term.coefficient) {
      add_constant(term.op.matrix(), 1.0, false);
      if (term.hermitian_pair) add_constant(term.op.matrix(), 1.0, true);
      continue;
    }
    constant_ = false;
    CompiledTerm compiled;
    compiled.coefficient = term.coefficient;
    for_each_nonzero(term.op.matrix(), [&](Index r, Index c, Complex v) {
      compiled.direct.push_back({find_slot(matrix_, r, c), v});
      if (term.hermitian_pair) compiled.adjoint.push_back({find_slot(matrix_, c, r), std::conj(v)});
    });
    terms_.push_back(std::move(compiled));
  }
  if (constant_extra != nullptr) add_constant(*constant_extra, 1.0, false);
}

const SparseMatrix& CompiledOperator::at(double t) {
  if (constant_ && filled_) return matrix_;
  Complex* values = matrix_.valuePtr();
  std::copy(constant_values_.begin(), constant_values_.end(), values);
  for (const auto& term : terms_) {
    const Complex c = term.coefficient(t);
    const Complex cc = std::conj(c);
    for (const auto& e : term.direct) values[e.slot] += c * e.value;
    for (const auto& e : term.adjoint) values[e.slot] += cc * e.value;
  }
  filled_ = true;
  return matrix_;
}

// ---- steppers -------------------------------------------------------------------

namespace {

class Rk4 {
 public:
  Rk4(const Rhs& rhs, const Matrix& shape) : rhs_(rhs) {
    for (auto* m : {&k1_, &k2_, &k3_, &k4_, &tmp_}) m->resize(shape.rows(), shape.cols());
  }

  void step(double t, double h, Matrix& y) {
    rhs_(t, y, k1_);
    tmp_ = y + (0.5 * h) * k1_;
    rhs_(t + 0.5 * h, tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    rhs_(t + 0.5 * h, tmp_, k3_);
    tmp_ = y + h * k3_;
    rhs_(t + h, tmp_, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  const Rhs& rhs_;
  Matrix k1_, k2_, k3_, k4_, tmp_;
};

// Dormand–Prince 5(4) with first-same-as-last reuse.
class DormandPrince {
 public:
  DormandPrince(const Rhs& rhs, const IntegratorConfig& cfg, const Matrix& shape) : rhs_(rhs), cfg_(cfg) {
    for (auto* m : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &next_}) {
      m->resize(shape.rows(), shape.cols());
    }
  }

  /// Advances y from t to t_target. Throws NumericalError on step-size underflow.
  void advance(double& t, double t_target, double& h, Matrix& y, StepStats& stats) {
    if (!have_k1_) {
      rhs_(t, y, k1_);
      have_k1_ = true;
    }
    while (t < t_target) {
      double step = std::min(h, t_target - t);
      if (cfg_.max_step > 0.0) step = std::min(step, cfg_.max_step);
      const bool last = step >= t_target - t;
      const double err = attempt(t, step, y);
      if (err <= 1.0) {
        t = last ? t_target : t + step;
        y.swap(next_);
        k1_.swap(k7_);
        ++stats.steps;
        stats.min_step = stats.steps == 1 ? step : std::min(stats.min_step, step);
        const double growth = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A step shortened to land on a sample says nothing about the safe size.
        if (!last || step >= h) h = step * growth;
      } else {
        ++stats.rejected;
        h = step * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
      if (!(h > std::abs(t) * 1e-14 + std::numeric_limits<double>::min())) {
        throw NumericalError("adaptive integrator: step size underflow at t = " + std::to_string(t));
      }
    }
  }

  /// The observer may have modified y; the cached derivative is stale.
  void invalidate() noexcept { have_k1_ = false; }

 private:
  double attempt(double t, double h, const Matrix& y) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                     b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    tmp_ = y + h * a21 * k1_;
    rhs_(t + h / 5.0, tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    rhs_(t + 3.0 * h / 10.0, tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t + 4.0 * h / 5.0, tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t + 8.0 * h / 9.0, tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t + h, tmp_, k6_);
    next_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    rhs_(t + h, next_, k7_);
    tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);

    double err = 0.0;
    for (Index c = 0; c < y.cols(); ++c) {
      for (Index r = 0; r < y.rows(); ++r) {
        const double scale = cfg_.atol + cfg_.rtol * std::max(std::abs(y(r, c)), std::abs(next_(r, c)));
        err = std::max(err, std::abs(tmp_(r, c)) / scale);
      }
    }
    if (!std::isfinite(err)) return std::numeric_limits<double>::infinity();
    return err;
  }

  const Rhs& rhs_;
  const IntegratorConfig& cfg_;
  Matrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, next_;
  bool have_k1_ = false;
};

}  // namespace

StepStats integrate(const Rhs& rhs, Matrix& y, const std::vector<double>& samples, const IntegratorConfig& cfg,
                    double nominal_dt, const Observer& observe) {
  StepStats stats;
  if (samples.empty()) return stats;
  observe(0, samples.front(), y);

  if (cfg.method == Method::FixedRK4) {
    Rk4 stepper(rhs, y);
    stats.min_step = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s < samples.size(); ++s) {
      const double t0 = samples[s - 1];
      const double interval = samples[s] - t0;
      const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(interval / nominal_dt - 1e-9)));
      const double h = interval / static_cast<double>(substeps);
      for (std::size_t k = 0; k < substeps; ++k) {
        stepper.step(t0 + static_cast<double>(k) * h, h, y);
      }
      stats.steps += substeps;
      stats.min_step = std::min(stats.min_step, h);
      if (!y.allFinite()) throw NumericalError("fixed-step integrator produced non-finite values");
      observe(s, samples[s], y);
    }
    if (!std::isfinite(stats.min_step)) stats.min_step = 0.0;
    return stats;
  }

  DormandPrince stepper(rhs, cfg, y);
  double t = samples.front();
  double h = std::min(nominal_dt, samples.back() - samples.front());
  for (std::size_t s = 1; s < samples.size(); ++s) {
    stepper.advance(t, samples[s], h, y, stats);
    if (!y.allFinite()) throw NumericalError("adaptive integrator produced non-finite values");
    observe(s, samples[s], y);
    stepper.invalidate();
  }
  return stats;
}

}  // namespace modrabi::dynamics::detail
