#pragma once

// Schrödinger and Lindblad propagation of TimeDependentHamiltonian values.
//
// The Hamiltonian is compiled once into a sparse pattern shared by all of its
// terms; each right-hand-side evaluation refills the values and applies
// sparse × dense products. States are returned as dense matrices.

#include <map>
#include <string>
#include <vector>

#include "modrabi/hamiltonians.hpp"
#include "modrabi/quantum.hpp"

namespace modrabi::dynamics {

using hamiltonians::TimeDependentHamiltonian;
using quantum::DensityMatrix;
using quantum::HilbertSpace;
using quantum::Operator;
using quantum::PureState;

/// `samples` equally spaced output times from t_start to t_end inclusive.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int samples = 0;

  void validate() const;
  std::vector<double> times() const;
};

enum class Method { FixedRK4, AdaptiveRK45 };

const char* to_string(Method method) noexcept;

struct IntegratorConfig {
  Method method = Method::FixedRK4;
  /// Fixed step; 0 selects 2π / (points_per_period · ω_max).
  double dt = 0.0;
  int points_per_period = 40;
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Upper bound on adaptive steps; 0 means unbounded.
  double max_step = 0.0;
  /// Keep every k-th grid sample (the last sample is always kept).
  int store_every = 1;
  bool store_states = false;

  void validate() const;
};

/// Largest angular frequency the fixed stepper must resolve: the descriptor's
/// fastest frequency or the 1-norm of H(0), whichever is larger.
double characteristic_frequency(const TimeDependentHamiltonian& h);

/// Step used by FixedRK4 for `h` under `cfg` before grid alignment.
double nominal_step(const TimeDependentHamiltonian& h, const IntegratorConfig& cfg);

/// rate · D[L] with D[L]ρ = LρL† − ½{L†L, ρ}.
struct Dissipator {
  Operator jump;
  double rate = 0.0;
};

/// σ₋ on every qubit with rate κ and a with rate γ; zero rates are skipped.
std::vector<Dissipator> standard_dissipators(const HilbertSpace& space, double kappa, double gamma);

struct NamedObservable {
  std::string name;
  Operator op;
};

/// sigma_pop = Σ_i σ₊σ₋ on qubit i, photon_number = a†a, top_fock_pop.
std::vector<NamedObservable> standard_observables(const HilbertSpace& space);

struct Diagnostics {
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  double dt = 0.0;  ///< fixed step used, or the smallest accepted adaptive step
  double max_norm_drift = 0.0;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double max_top_fock_population = 0.0;
  bool cutoff_adequate = true;
};

inline constexpr double kCutoffTolerance = 1e-6;
inline constexpr double kPositivityTolerance = -1e-6;

struct Trajectory {
  HilbertSpace space;
  bool mixed = false;
  std::vector<double> times;
  /// Column vectors (pure) or density matrices, when requested.
  std::vector<Matrix> states;
  std::map<std::string, std::vector<double>> observables;
  Diagnostics diagnostics;

  const std::vector<double>& observable(const std::string& name) const;
  PureState pure_state(std::size_t i) const;
  DensityMatrix density_matrix(std::size_t i) const;
};

/// Observables always include those of standard_observables plus "norm"
/// (pure) or "trace" and "purity" (mixed).
Trajectory evolve_schrodinger(const TimeDependentHamiltonian& h, const PureState& psi0, const TimeGrid& grid,
                              const IntegratorConfig& cfg, const std::vector<NamedObservable>& extra = {});

/// Throws NumericalError when the minimum eigenvalue at a stored step drops
/// below kPositivityTolerance.
Trajectory evolve_master(const TimeDependentHamiltonian& h, const std::vector<Dissipator>& dissipators,
                         const DensityMatrix& rho0, const TimeGrid& grid, const IntegratorConfig& cfg,
                         const std::vector<NamedObservable>& extra = {});

/// Propagates each column of `columns` from t0 to t1 under i∂ₜψ = H(t)ψ.
Matrix propagate_columns(const TimeDependentHamiltonian& h, const Matrix& columns, double t0, double t1,
                         const IntegratorConfig& cfg);

/// |⟨ψ|ρ|ψ⟩|.
double fidelity(const PureState& psi, const DensityMatrix& rho);
double fidelity(const Vector& psi, const Matrix& rho);

/// Pointwise fidelity of a pure reference trajectory against a pure or mixed
/// one on the same grid. Both must have stored states.
std::vector<double> fidelity_series(const Trajectory& reference, const Trajectory& actual);

/// Matrix of the dissipative part of the Lindblad generator acting on
/// column-stacked vec(ρ).
Matrix lindblad_superoperator(const std::vector<Dissipator>& dissipators);

struct PeriodEstimate {
  double period = 0.0;
  double spread = 0.0;  ///< max − min spacing between consecutive maxima
  int maxima = 0;
};

/// Oscillation period from parabolically interpolated maxima, one per
/// complete excursion above the upper quarter band of the series range (an
/// excursion ends when the series drops below the lower quarter band). Throws
/// NumericalError when fewer than two maxima are found.
PeriodEstimate extract_period(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace modrabi::dynamics
