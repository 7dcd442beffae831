#include "modrabi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "integrators.hpp"
#include "modrabi/errors.hpp"

namespace modrabi::dynamics {

using detail::CompiledOperator;
using detail::SparseMatrix;
using quantum::PauliKind;

void TimeGrid::validate() const {
  if (samples < 2) throw ValidationError("grid.samples must be >= 2");
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    throw ValidationError("grid: t_end must be finite and greater than t_start");
  }
}

std::vector<double> TimeGrid::times() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(samples));
  const double span = t_end - t_start;
  for (int i = 0; i < samples; ++i) {
    out[static_cast<std::size_t>(i)] = t_start + span * static_cast<double>(i) / (samples - 1);
  }
  out.back() = t_end;
  return out;
}

const char* to_string(Method method) noexcept {
  return method == Method::FixedRK4 ? "fixed_rk4" : "adaptive_rk45";
}

void IntegratorConfig::validate() const {
  if (!std::isfinite(dt) || dt < 0.0) throw ValidationError("integrator.dt must be >= 0 (0 selects automatic)");
  if (points_per_period < 4) throw ValidationError("integrator.points_per_period must be >= 4");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ValidationError("integrator: rtol and atol must be > 0");
  if (!std::isfinite(max_step) || max_step < 0.0) throw ValidationError("integrator.max_step must be >= 0");
  if (store_every < 1) throw ValidationError("integrator.store_every must be >= 1");
}

double characteristic_frequency(const TimeDependentHamiltonian& h) {
  const Matrix& m = h.evaluate(0.0).matrix();
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  return std::max(h.descriptor().fastest_frequency, norm1);
}

double nominal_step(const TimeDependentHamiltonian& h, const IntegratorConfig& cfg) {
  if (cfg.dt > 0.0) return cfg.dt;
  const double w = characteristic_frequency(h);
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi / (cfg.points_per_period * w);
}

std::vector<Dissipator> standard_dissipators(const HilbertSpace& space, double kappa, double gamma) {
  if (!(kappa >= 0.0) || !(gamma >= 0.0)) throw ValidationError("dissipation rates must be >= 0");
  std::vector<Dissipator> out;
  if (kappa > 0.0) {
    for (int q = 0; q < space.n_qubits(); ++q) {
      out.push_back({quantum::qubit_operator(space, q, PauliKind::Minus), kappa});
    }
  }
  if (gamma > 0.0 && space.has_resonator()) out.push_back({quantum::annihilation(space), gamma});
  return out;
}

std::vector<NamedObservable> standard_observables(const HilbertSpace& space) {
  Operator excitation = Operator::zero(space);
  for (int q = 0; q < space.n_qubits(); ++q) {
    excitation += quantum::qubit_projector(space, q, quantum::QubitLevel::Excited);
  }
  std::vector<NamedObservable> out;
  out.push_back({"sigma_pop", std::move(excitation)});
  if (space.has_resonator()) {
    out.push_back({"photon_number", quantum::number(space)});
    out.push_back({"top_fock_pop", quantum::top_fock_projector(space)});
  }
  return out;
}

const std::vector<double>& Trajectory::observable(const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) throw ValidationError("trajectory has no observable '" + name + "'");
  return it->second;
}

PureState Trajectory::pure_state(std::size_t i) const {
  if (mixed) throw ValidationError("trajectory holds density matrices");
  return PureState::normalized(space, states.at(i).col(0));
}

DensityMatrix Trajectory::density_matrix(std::size_t i) const {
  if (!mixed) {
    const Vector psi = states.at(i).col(0);
    return DensityMatrix(space, psi * psi.adjoint() / psi.squaredNorm());
  }
  return DensityMatrix(space, states.at(i));
}

namespace {

struct Recorder {
  Recorder(const HilbertSpace& space, const std::vector<NamedObservable>& extra, const IntegratorConfig& cfg,
           std::size_t samples, bool mixed)
      : cfg(cfg), samples(samples), mixed(mixed) {
    observables = standard_observables(space);
    observables.insert(observables.end(), extra.begin(), extra.end());
    for (const auto& o : observables) {
      if (!(o.op.space() == space)) throw ValidationError("observable '" + o.name + "' lives on another space");
    }
  }

  bool keep(std::size_t s) const {
    return s % static_cast<std::size_t>(cfg.store_every) == 0 || s + 1 == samples;
  }

  void record(Trajectory& traj, double t, const Matrix& state) {
    traj.times.push_back(t);
    for (const auto& o : observables) {
      double value;
      if (mixed) {
        value = quantum::trace_product(o.op.matrix(), state).real();
      } else {
        const auto psi = state.col(0);
        value = psi.dot(o.op.matrix() * psi).real();
      }
      traj.observables[o.name].push_back(value);
    }
    if (cfg.store_states) traj.states.push_back(state);
  }

  const IntegratorConfig& cfg;
  std::size_t samples;
  bool mixed;
  std::vector<NamedObservable> observables;
};

void finish_cutoff(Trajectory& traj) {
  const auto it = traj.observables.find("top_fock_pop");
  if (it == traj.observables.end() || it->second.empty()) return;
  traj.diagnostics.max_top_fock_population = *std::max_element(it->second.begin(), it->second.end());
  traj.diagnostics.cutoff_adequate = traj.diagnostics.max_top_fock_population <= kCutoffTolerance;
}

void require_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (!(a == b)) throw ValidationError("hamiltonian and state live on different spaces");
}

}  // namespace

Trajectory evolve_schrodinger(const TimeDependentHamiltonian& h, const PureState& psi0, const TimeGrid& grid,
                              const IntegratorConfig& cfg, const std::vector<NamedObservable>& extra) {
  require_space(h.space(), psi0.space());
  cfg.validate();
  const std::vector<double> samples = grid.times();

  Trajectory traj{h.space(), false, {}, {}, {}, {}};
  Recorder recorder(h.space(), extra, cfg, samples.size(), false);
  CompiledOperator compiled(h);
  const detail::Rhs rhs = [&compiled](double t, const Matrix& y, Matrix& dy) {
    dy.noalias() = compiled.at(t) * y;
    dy *= -kI;
  };
  const detail::Observer observe = [&](std::size_t s, double t, Matrix& y) {
    const double drift = std::abs(y.col(0).norm() - 1.0);
    traj.diagnostics.max_norm_drift = std::max(traj.diagnostics.max_norm_drift, drift);
    if (!recorder.keep(s)) return;
    recorder.record(traj, t, y);
    traj.observables["norm"].push_back(y.col(0).norm());
  };

  Matrix y = psi0.amplitudes();
  const double dt = nominal_step(h, cfg);
  const detail::StepStats stats = detail::integrate(rhs, y, samples, cfg, dt, observe);
  traj.diagnostics.steps = stats.steps;
  traj.diagnostics.rejected_steps = stats.rejected;
  traj.diagnostics.dt = stats.min_step;
  traj.diagnostics.min_eigenvalue = 0.0;
  finish_cutoff(traj);
  return traj;
}

Trajectory evolve_master(const TimeDependentHamiltonian& h, const std::vector<Dissipator>& dissipators,
                         const DensityMatrix& rho0, const TimeGrid& grid, const IntegratorConfig& cfg,
                         const std::vector<NamedObservable>& extra) {
  require_space(h.space(), rho0.space());
  cfg.validate();
  const std::vector<double> samples = grid.times();
  const Index n = h.space().dim();

  // K = H − (i/2) Σ rate L†L, jumps carry √rate.
  Matrix decay = Matrix::Zero(n, n);
  std::vector<SparseMatrix> jumps;
  for (const auto& d : dissipators) {
    if (!(d.jump.space() == h.space())) throw ValidationError("dissipator lives on a different space");
    if (!(d.rate >= 0.0) || !std::isfinite(d.rate)) throw ValidationError("dissipator rate must be >= 0");
    if (d.rate == 0.0) continue;
    const Matrix l = std::sqrt(d.rate) * d.jump.matrix();
    decay += l.adjoint() * l;
    jumps.push_back(l.sparseView());
  }
  decay *= Complex(0.0, -0.5);
  CompiledOperator compiled(h, &decay);

  // Stage states stay Hermitian, so −iKρ + iρK† = M + M† with M = −iKρ and
  // JρJ† = J(Jρ)†. Stored steps are symmetrized against roundoff drift.
  Matrix m(n, n);
  Matrix scratch(n, n);
  const detail::Rhs rhs = [&](double t, const Matrix& rho, Matrix& drho) {
    m.noalias() = compiled.at(t) * rho;
    m *= -kI;
    drho = m + m.adjoint();
    for (const auto& jump : jumps) {
      scratch.noalias() = jump * rho;
      m.noalias() = jump * scratch.adjoint();
      drho += m;
    }
  };

  Trajectory traj{h.space(), true, {}, {}, {}, {}};
  traj.diagnostics.min_eigenvalue = std::numeric_limits<double>::infinity();
  Recorder recorder(h.space(), extra, cfg, samples.size(), true);
  Eigen::SelfAdjointEigenSolver<Matrix> eigen;
  const detail::Observer observe = [&](std::size_t s, double t, Matrix& rho) {
    const double drift = std::abs(rho.trace().real() - 1.0);
    traj.diagnostics.max_trace_drift = std::max(traj.diagnostics.max_trace_drift, drift);
    if (!recorder.keep(s)) return;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    eigen.compute(rho, Eigen::EigenvaluesOnly);
    const double lowest = eigen.eigenvalues().minCoeff();
    traj.diagnostics.min_eigenvalue = std::min(traj.diagnostics.min_eigenvalue, lowest);
    if (lowest < kPositivityTolerance) {
      throw NumericalError("positivity violated at t = " + std::to_string(t) + " s: minimum eigenvalue " +
                           std::to_string(lowest) + " (check fock_cutoff and step size)");
    }
    recorder.record(traj, t, rho);
    traj.observables["trace"].push_back(rho.trace().real());
    traj.observables["purity"].push_back(quantum::trace_product(rho, rho).real());
  };

  Matrix rho = rho0.matrix();
  const double dt = nominal_step(h, cfg);
  const detail::StepStats stats = detail::integrate(rhs, rho, samples, cfg, dt, observe);
  traj.diagnostics.steps = stats.steps;
  traj.diagnostics.rejected_steps = stats.rejected;
  traj.diagnostics.dt = stats.min_step;
  finish_cutoff(traj);
  return traj;
}

Matrix propagate_columns(const TimeDependentHamiltonian& h, const Matrix& columns, double t0, double t1,
                         const IntegratorConfig& cfg) {
  if (columns.rows() != h.space().dim()) throw ValidationError("propagate_columns: row count mismatch");
  cfg.validate();
  CompiledOperator compiled(h);
  const detail::Rhs rhs = [&compiled](double t, const Matrix& y, Matrix& dy) {
    dy.noalias() = compiled.at(t) * y;
    dy *= -kI;
  };
  Matrix y = columns;
  detail::integrate(rhs, y, {t0, t1}, cfg, nominal_step(h, cfg), [](std::size_t, double, Matrix&) {});
  return y;
}

double fidelity(const Vector& psi, const Matrix& rho) {
  if (psi.size() != rho.rows() || rho.rows() != rho.cols()) throw ValidationError("fidelity: dimension mismatch");
  return std::abs(psi.dot(rho * psi));
}

double fidelity(const PureState& psi, const DensityMatrix& rho) {
  if (!(psi.space() == rho.space())) throw ValidationError("fidelity: states live on different spaces");
  return fidelity(psi.amplitudes(), rho.matrix());
}

std::vector<double> fidelity_series(const Trajectory& reference, const Trajectory& actual) {
  if (reference.mixed) throw ValidationError("fidelity_series: reference must be pure");
  if (reference.states.size() != actual.states.size() || reference.states.empty()) {
    throw ValidationError("fidelity_series: both trajectories need stored states on the same grid");
  }
  std::vector<double> out;
  out.reserve(reference.states.size());
  for (std::size_t i = 0; i < reference.states.size(); ++i) {
    const Vector psi = reference.states[i].col(0);
    if (actual.mixed) {
      out.push_back(fidelity(psi, actual.states[i]));
    } else {
      out.push_back(std::norm(psi.dot(actual.states[i].col(0))));
    }
  }
  return out;
}

Matrix lindblad_superoperator(const std::vector<Dissipator>& dissipators) {
  if (dissipators.empty()) return Matrix();
  const Index n = dissipators.front().jump.space().dim();
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n * n, n * n);
  for (const auto& d : dissipators) {
    const Matrix& l = d.jump.matrix();
    const Matrix ldl = l.adjoint() * l;
    // vec(AXB) = (Bᵀ ⊗ A) vec(X)
    out += d.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  return out;
}

PeriodEstimate extract_period(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw ValidationError("extract_period: length mismatch");
  if (values.size() < 3) throw NumericalError("extract_period: series too short");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double mid = 0.5 * (*lo + *hi);
  if (!(*hi > *lo)) throw NumericalError("extract_period: no oscillation detected");

  // One maximum per excursion, delimited with hysteresis: an excursion opens
  // when the series rises above the upper band and closes when it falls below
  // the lower band, so ripple near the midpoint cannot split it. Excursions
  // not preceded by a dip below the lower band, or still open at the end,
  // are incomplete and skipped.
  const double band = 0.25 * (*hi - *lo);
  const double upper = mid + band, lower = mid - band;
  std::vector<double> peaks;
  const std::size_t n = values.size();
  bool armed = false, open = false;
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    if (open) {
      if (v > values[best]) best = i;
      if (v >= lower) continue;
      open = false;
      armed = true;
      if (best == 0 || best + 1 == n) continue;
      const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
      const double x0 = times[best - 1], x1 = times[best], x2 = times[best + 1];
      const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
      const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
      const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
      const double vertex = (a < 0.0) ? -b / (2.0 * a) : x1;
      peaks.push_back(std::clamp(vertex, x0, x2));
    } else if (v < lower) {
      armed = true;
    } else if (armed && v > upper) {
      open = true;
      best = i;
    }
  }
  if (peaks.size() < 2) throw NumericalError("extract_period: fewer than two maxima detected");

  PeriodEstimate est;
  est.maxima = static_cast<int>(peaks.size());
  est.period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
  double smallest = std::numeric_limits<double>::infinity();
  double largest = 0.0;
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    smallest = std::min(smallest, peaks[i] - peaks[i - 1]);
    largest = std::max(largest, peaks[i] - peaks[i - 1]);
  }
  est.spread = largest - smallest;
  return est;
}

}  // namespace modrabi::dynamics
