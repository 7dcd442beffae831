#include "modrabi/applications.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "modrabi/errors.hpp"

namespace modrabi::applications {

using quantum::PauliKind;
using quantum::QubitLevel;

MagnusPhase magnus_phase(double g_eff, double omega_eff, double t) {
  if (omega_eff == 0.0 || !std::isfinite(omega_eff)) {
    throw ValidationError("magnus_phase: omega_eff must be finite and nonzero");
  }
  const double ratio = g_eff / omega_eff;
  const double wt = omega_eff * t;
  return {ratio * (1.0 - std::exp(kI * wt)), ratio * ratio * (wt - std::sin(wt))};
}

Truncated<Operator> magnus_propagator(double g_eff, double omega_eff, double t, const HilbertSpace& space) {
  if (!space.has_resonator() || space.n_qubits() < 1) {
    throw ValidationError("magnus_propagator: requires a qubit ⊗ resonator space");
  }
  const MagnusPhase mp = magnus_phase(g_eff, omega_eff, t);
  const HilbertSpace qubits = space.qubit_factor();
  const HilbertSpace resonator = space.resonator_factor();

  Eigen::SelfAdjointEigenSolver<Matrix> jx(quantum::collective_operator(qubits, PauliKind::X).matrix());
  Matrix u = Matrix::Zero(space.dim(), space.dim());
  double tail = 0.0;
  for (Index k = 0; k < jx.eigenvalues().size(); ++k) {
    // Jx has integer spectrum; rounding removes eigensolver noise.
    const double m = std::round(jx.eigenvalues()(k));
    const Vector v = jx.eigenvectors().col(k);
    const auto d = quantum::displacement(resonator, mp.xi * m);
    tail = std::max(tail, d.tail_mass);
    u += kron(v * v.adjoint(), std::exp(kI * (mp.phi * m * m)) * d.value.matrix());
  }
  return {Operator(space, std::move(u)), tail};
}

Truncated<PureState> cat_evolution(double g_eff, double omega_eff, double t, const HilbertSpace& space) {
  if (space.n_qubits() != 1 || !space.has_resonator()) {
    throw ValidationError("cat_evolution: requires one qubit ⊗ resonator");
  }
  const MagnusPhase mp = magnus_phase(g_eff, omega_eff, t);
  const HilbertSpace resonator = space.resonator_factor();
  const auto plus_xi = quantum::coherent_state(resonator, mp.xi);
  const auto minus_xi = quantum::coherent_state(resonator, -mp.xi);

  Vector plus(2), minus(2);  // (g, e) components of |±⟩
  plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  minus << -1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  Vector psi = kron(plus, plus_xi.value.amplitudes()) - kron(minus, minus_xi.value.amplitudes());
  psi *= std::exp(kI * mp.phi) / std::numbers::sqrt2;
  return {PureState::normalized(space, std::move(psi)), std::max(plus_xi.tail_mass, minus_xi.tail_mass)};
}

CatState cat_state(const HilbertSpace& resonator, Complex xi, Parity parity) {
  const auto plus_xi = quantum::coherent_state(resonator, xi);
  const auto minus_xi = quantum::coherent_state(resonator, -xi);
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  Vector v = plus_xi.value.amplitudes() + sign * minus_xi.value.amplitudes();
  if (v.norm() == 0.0) throw NumericalError("cat_state: odd cat with xi = 0 does not exist");
  return {parity, xi, PureState::normalized(resonator, std::move(v))};
}

ConditionalCat conditional_cat(const PureState& state, QubitLevel outcome, Complex xi) {
  const HilbertSpace& space = state.space();
  if (space.n_qubits() != 1 || !space.has_resonator()) {
    throw ValidationError("conditional_cat: requires one qubit ⊗ resonator");
  }
  const Index n = space.fock_cutoff();
  const Index offset = outcome == QubitLevel::Ground ? 0 : n;
  Vector part = state.amplitudes().segment(offset, n);
  const double probability = part.squaredNorm();
  if (!(probability > 0.0)) throw NumericalError("conditional_cat: outcome has zero probability");
  const Parity parity = outcome == QubitLevel::Ground ? Parity::Even : Parity::Odd;
  return {CatState{parity, xi, PureState::normalized(space.resonator_factor(), std::move(part))}, probability};
}

double entangling_power(double theta) {
  const double s = std::sin(2.0 * theta);
  return 2.0 / 9.0 * s * s;
}

double gate_angle(double coupling_ratio) { return 4.0 * std::numbers::pi * coupling_ratio * coupling_ratio; }

Operator gate_at_period(double g_eff, double omega_eff) {
  const double period = 2.0 * std::numbers::pi / omega_eff;
  const MagnusPhase mp = magnus_phase(g_eff, omega_eff, period);
  const HilbertSpace qubits = HilbertSpace::qubits_only(2);
  const Matrix jx = quantum::collective_operator(qubits, PauliKind::X).matrix();
  // Jx² = 2I + 2σ₁ₓσ₂ₓ; the identity part is the omitted global phase.
  Matrix u = expm(kI * mp.phi * (jx * jx)) * std::exp(-2.0 * kI * mp.phi);
  return Operator(qubits, std::move(u));
}

LocalUnitaries LocalUnitaries::reference() {
  const double s = 1.0 / std::numbers::sqrt2;
  LocalUnitaries l;
  l.u1.resize(2, 2);
  l.u1 << -s, s, s, s;
  l.u2 = Matrix::Identity(2, 2);
  l.u3.resize(2, 2);
  l.u3 << -s, -kI * s, s, -kI * s;
  l.u4.resize(2, 2);
  l.u4 << s, kI * s, kI * s, s;
  return l;
}

Matrix cnot(bool control_first) {
  Matrix c = Matrix::Zero(4, 4);
  if (control_first) {
    c(0, 0) = c(1, 1) = 1.0;
    c(2, 3) = c(3, 2) = 1.0;
  } else {
    c(0, 0) = c(2, 2) = 1.0;
    c(1, 3) = c(3, 1) = 1.0;
  }
  return c;
}

double phase_insensitive_residual(const Matrix& candidate, const Matrix& target) {
  if (candidate.rows() != target.rows() || candidate.cols() != target.cols()) {
    throw ValidationError("phase_insensitive_residual: shape mismatch");
  }
  Index r = 0, c = 0;
  candidate.cwiseAbs().maxCoeff(&r, &c);
  double phase = std::arg(candidate(r, c));
  if (target(r, c) != Complex(0.0)) phase -= std::arg(target(r, c));
  return (candidate * std::exp(-kI * phase) - target).cwiseAbs().maxCoeff();
}

CnotCheck cnot_equivalence_check(const Matrix& gate, const LocalUnitaries& locals, double tol) {
  if (gate.rows() != 4 || gate.cols() != 4) throw ValidationError("cnot_equivalence_check: gate must be 4x4");
  if ((gate.adjoint() * gate - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("cnot_equivalence_check: gate is not unitary within 1e-9");
  }
  CnotCheck out;
  const Matrix first = kron(locals.u1, locals.u2) * gate * kron(locals.u3, locals.u4);
  const Matrix second = kron(locals.u2, locals.u1) * gate * kron(locals.u4, locals.u3);
  out.residual_control_first = phase_insensitive_residual(first, cnot(true));
  out.residual_control_second = phase_insensitive_residual(second, cnot(false));
  if (out.residual_control_first < tol) {
    out.matched = "control_first";
  } else if (out.residual_control_second < tol) {
    out.matched = "control_second";
  } else {
    out.matched = "none";
  }
  out.equivalent = out.matched != "none";
  return out;
}

}  // namespace modrabi::applications
