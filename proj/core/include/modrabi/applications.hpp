#pragma once

// Closed-form propagator of the reduced Dicke Hamiltonian g(a†e^{iω̃t} +
// ae^{-iω̃t})Jx and the states and gates it produces.

#include <string>

#include "modrabi/quantum.hpp"

namespace modrabi::applications {

using quantum::HilbertSpace;
using quantum::Operator;
using quantum::PureState;
using quantum::Truncated;

struct MagnusPhase {
  Complex xi;        ///< (g/ω̃)(1 − e^{iω̃t})
  double phi = 0.0;  ///< (g/ω̃)²(ω̃t − sin ω̃t)
};

MagnusPhase magnus_phase(double g_eff, double omega_eff, double t);

/// exp(iφJx²)D(ξJx), assembled per Jx eigenspace m as e^{iφm²}D(ξm). The tail
/// mass is that of the largest displacement |ξ|·n_qubits.
Truncated<Operator> magnus_propagator(double g_eff, double omega_eff, double t, const HilbertSpace& space);

/// (e^{iφ}/√2)(|ξ⟩|+⟩ − |−ξ⟩|−⟩) on a one-qubit space, |±⟩ = (|e⟩ ± |g⟩)/√2.
/// This is the image of |g⟩|0⟩ under magnus_propagator.
Truncated<PureState> cat_evolution(double g_eff, double omega_eff, double t, const HilbertSpace& space);

enum class Parity { Even, Odd };

struct CatState {
  Parity parity = Parity::Even;
  Complex xi;
  PureState state;  ///< on the resonator-only space
};

/// (|ξ⟩ ± |−ξ⟩) normalized on a resonator-only space.
CatState cat_state(const HilbertSpace& resonator, Complex xi, Parity parity);

struct ConditionalCat {
  CatState cat;
  double probability = 0.0;
};

/// Projects the single qubit of `state` onto `outcome` and renormalizes the
/// resonator part: Ground yields the even cat, Excited the odd cat. `xi` is
/// recorded on the result. Throws NumericalError for a zero-probability
/// outcome.
ConditionalCat conditional_cat(const PureState& state, quantum::QubitLevel outcome, Complex xi);

/// (2/9) sin²(2ϑ).
double entangling_power(double theta);
/// ϑ = 2φ(T) = 4π(g/ω̃)².
double gate_angle(double coupling_ratio);

/// exp(iφ(T)Jx²) on two qubits with the global factor e^{2iφ(T)} removed,
/// i.e. cos ϑ I + i sin ϑ σ₁ₓσ₂ₓ.
Operator gate_at_period(double g_eff, double omega_eff);

struct LocalUnitaries {
  Matrix u1, u2, u3, u4;
  static LocalUnitaries reference();
};

struct CnotCheck {
  /// (u1⊗u2)·G·(u3⊗u4) against CNOT with control on qubit 1.
  double residual_control_first = 0.0;
  /// (u2⊗u1)·G·(u4⊗u3) against CNOT with control on qubit 2.
  double residual_control_second = 0.0;
  bool equivalent = false;
  std::string matched;  ///< "control_first", "control_second" or "none"
};

inline constexpr double kCnotTolerance = 1e-9;

Matrix cnot(bool control_first = true);

/// Entrywise residual after removing the global phase fixed by the
/// largest-magnitude entry of the candidate.
double phase_insensitive_residual(const Matrix& candidate, const Matrix& target);

/// Throws ValidationError when the gate is not a 4×4 unitary (1e-9).
CnotCheck cnot_equivalence_check(const Matrix& gate, const LocalUnitaries& locals = LocalUnitaries::reference(),
                                 double tol = kCnotTolerance);

}  // namespace modrabi::applications
