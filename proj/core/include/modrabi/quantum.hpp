#pragma once

// Truncated qubit ⊗ Fock-space linear algebra.
//
// Basis ordering is fixed: qubit_1 ⊗ … ⊗ qubit_n ⊗ resonator with row-major
// composite indexing, so the resonator level varies fastest and qubit_1 is
// the most significant digit. Each qubit uses level 0 = |g⟩, 1 = |e⟩ and
// σ_z|e⟩ = +|e⟩.

#include <span>
#include <vector>

#include "modrabi/linalg.hpp"

namespace modrabi::quantum {

enum class QubitLevel : int { Ground = 0, Excited = 1 };

class HilbertSpace {
 public:
  /// Full qubits ⊗ resonator space. Requires n_qubits ≥ 1, fock_cutoff ≥ 2.
  HilbertSpace(int n_qubits, int fock_cutoff);

  /// Reduced spaces produced by partial traces and used to build factors.
  static HilbertSpace qubits_only(int n_qubits);
  static HilbertSpace resonator_only(int fock_cutoff);

  int n_qubits() const noexcept { return n_qubits_; }
  /// Number of Fock levels; 1 when the space carries no resonator.
  int fock_cutoff() const noexcept { return fock_cutoff_; }
  bool has_resonator() const noexcept { return fock_cutoff_ > 1; }
  Index qubit_dim() const noexcept { return Index{1} << n_qubits_; }
  Index dim() const noexcept { return qubit_dim() * fock_cutoff_; }

  Index index(std::span<const QubitLevel> qubits, int fock) const;
  Index index(QubitLevel qubit, int fock) const;
  int fock_level(Index i) const noexcept { return static_cast<int>(i % fock_cutoff_); }
  QubitLevel qubit_level(Index i, int which) const;
  /// σ_z eigenvalue summed over all qubits for basis state i.
  int total_sigma_z(Index i) const;

  HilbertSpace qubit_factor() const;
  HilbertSpace resonator_factor() const;

  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  struct Unchecked {};
  HilbertSpace(int n_qubits, int fock_cutoff, Unchecked) noexcept
      : n_qubits_(n_qubits), fock_cutoff_(fock_cutoff) {}

  int n_qubits_;
  int fock_cutoff_;
};

class Operator {
 public:
  Operator(HilbertSpace space, Matrix matrix);

  static Operator zero(const HilbertSpace& space);
  static Operator identity(const HilbertSpace& space);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  Operator adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;
  bool is_unitary(double tol = 1e-9) const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(Complex scale);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator op, Complex scale) { return op *= scale; }
  friend Operator operator*(Complex scale, Operator op) { return op *= scale; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);

/// A ⊗ B where A lives on a qubits-only space. The result space has the
/// qubits of A followed by the qubits (and resonator, if any) of B.
Operator tensor(const Operator& a, const Operator& b);

class PureState {
 public:
  /// Requires ‖amplitudes‖₂ = 1 within 1e-12.
  PureState(HilbertSpace space, Vector amplitudes);

  static PureState normalized(HilbertSpace space, Vector amplitudes);
  static PureState basis(const HilbertSpace& space, Index i);
  /// |levels⟩ ⊗ |fock⟩.
  static PureState product(const HilbertSpace& space, std::span<const QubitLevel> levels,
                           int fock);

  const HilbertSpace& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }

  /// ⟨this|other⟩.
  Complex inner(const PureState& other) const;

 private:
  HilbertSpace space_;
  Vector amplitudes_;
};

PureState tensor(const PureState& a, const PureState& b);

class DensityMatrix {
 public:
  /// Requires Hermitian (1e-10), unit trace (1e-10), min eigenvalue ≥ -1e-8.
  DensityMatrix(HilbertSpace space, Matrix matrix);

  static DensityMatrix pure(const PureState& psi);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  double purity() const;
  double min_eigenvalue() const;

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class Subsystem { Qubits, Resonator };

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

enum class PauliKind { Z, X, Y, Plus, Minus };

Operator annihilation(const HilbertSpace& space);
Operator creation(const HilbertSpace& space);
Operator number(const HilbertSpace& space);
Operator qubit_operator(const HilbertSpace& space, int which_qubit, PauliKind kind);
/// Σ_i of the single-qubit operator over all qubits: J_± = Σσ_i±, J_x = Σσ_ix,
/// J_z here is Σσ_iz (twice the angular-momentum convention).
Operator collective_operator(const HilbertSpace& space, PauliKind kind);
/// Projector onto |level⟩ of one qubit (identity elsewhere).
Operator qubit_projector(const HilbertSpace& space, int which_qubit, QubitLevel level);
/// Projector onto the highest retained Fock level.
Operator top_fock_projector(const HilbertSpace& space);

inline constexpr double kTailTolerance = 1e-8;

/// A value built on a truncated Fock space together with the population an
/// ideal coherent state would place at or above the last retained level.
template <class T>
struct Truncated {
  T value;
  double tail_mass = 0.0;
  bool adequate(double tol = kTailTolerance) const noexcept { return tail_mass <= tol; }
};

/// Poisson mass Σ_{n ≥ cutoff-1} e^{-m} m^n / n! for mean m = |ξ|².
double coherent_tail_mass(double mean_photons, int fock_cutoff);

/// D(ξ) = exp(ξa† − ξ*a) on the full space (identity on qubits).
Truncated<Operator> displacement(const HilbertSpace& space, Complex xi);

/// D(ξ)|0⟩ on a resonator-only space, renormalized after truncation.
Truncated<PureState> coherent_state(const HilbertSpace& space, Complex xi);

Complex expectation(const Operator& op, const PureState& psi);
Complex expectation(const Operator& op, const DensityMatrix& rho);
/// Tr(op · rho) for raw matrices of matching size.
Complex trace_product(const Matrix& op, const Matrix& rho);

}  // namespace modrabi::quantum
