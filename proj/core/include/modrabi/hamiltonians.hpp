#pragma once

// Time-dependent Hamiltonians on the qubit ⊗ resonator space.
//
// A Hamiltonian is a finite sum Σ_k c_k(t)·O_k of constant operators with
// scalar coefficients. Terms flagged as Hermitian pairs contribute
// c_k(t)·O_k + conj(c_k(t))·O_k†, which keeps H(t) Hermitian by construction
// and lets the integrators compile a single sparsity pattern.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modrabi/modulation.hpp"
#include "modrabi/quantum.hpp"

namespace modrabi::hamiltonians {

using quantum::HilbertSpace;
using quantum::Operator;

enum class ModelKind {
  Lab,
  RotatedExact,
  Effective,
  QRM,
  JC,
  AJC,
  DegenerateAQRM,
  Dicke,
  DickeReduced,
  Custom,
};

const char* to_string(ModelKind kind) noexcept;

struct Term {
  Operator op;
  /// Empty means the constant coefficient 1.
  std::function<Complex(double)> coefficient;
  bool hermitian_pair = false;
};

struct Descriptor {
  ModelKind kind = ModelKind::Custom;
  std::map<std::string, double> parameters;
  /// Largest angular frequency appearing in any coefficient (0 if constant).
  double fastest_frequency = 0.0;
};

class TimeDependentHamiltonian {
 public:
  TimeDependentHamiltonian(HilbertSpace space, std::vector<Term> terms, Descriptor descriptor);

  static TimeDependentHamiltonian constant(Operator op, Descriptor descriptor = {});

  const HilbertSpace& space() const noexcept { return space_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const Descriptor& descriptor() const noexcept { return descriptor_; }
  bool is_constant() const noexcept;

  Operator evaluate(double t) const;

 private:
  HilbertSpace space_;
  std::vector<Term> terms_;
  Descriptor descriptor_;
};

/// Diagonal frame U(t) = U₁(t)U₂(t) written per basis state i as
/// U_ii = exp(i·θ_i(t)), θ_i(t) = rate_i·t + drive_weight_i·S(t) with
/// S(t) = Σ_j η_j sin(Ω_j t + φ_j).
class FramePhases {
 public:
  FramePhases(const HilbertSpace& space, const modulation::SystemParams& sys,
              const modulation::DriveParams& drive);

  const std::vector<double>& rates() const noexcept { return rates_; }
  const std::vector<double>& drive_weights() const noexcept { return drive_weights_; }

  double drive_phase(double t) const;
  double phase(Index i, double t) const;
  Operator unitary(double t) const;

 private:
  HilbertSpace space_;
  modulation::DriveParams drive_;
  std::vector<double> rates_;
  std::vector<double> drive_weights_;
};

/// ωa†a + (ε/2)Σσz + g(a + a†)Σσx + Σ_j Ω_jη_j cos(Ω_j t + φ_j) Σσz.
TimeDependentHamiltonian lab_hamiltonian(const modulation::SystemParams& sys,
                                         const modulation::DriveParams& drive,
                                         const HilbertSpace& space);

/// U†HU − iU†∂ₜU evaluated analytically, with no sideband truncation.
TimeDependentHamiltonian rotated_hamiltonian(const modulation::SystemParams& sys,
                                             const modulation::DriveParams& drive,
                                             const HilbertSpace& space);

/// ω̃a†a + (ε̃/2)Σσz + g_r(aJ₊e^{-iφ₁} + h.c.) + g_cr(aJ₋e^{iφ₂} + h.c.).
TimeDependentHamiltonian effective_hamiltonian(const modulation::EffectiveParams& eff,
                                               const HilbertSpace& space);

/// Specializations of the effective Hamiltonian. Throws ValidationError when
/// eff violates the specialization by more than `tol` (relative to the
/// largest coupling):
///   QRM             g_r = g_cr, φ₁ = φ₂ = 0
///   JC              g_cr = 0
///   AJC             g_r = 0
///   DegenerateAQRM  ω̃ = ε̃ = 0
/// Suppressed couplings are dropped from the result.
TimeDependentHamiltonian model(ModelKind kind, const modulation::EffectiveParams& eff,
                               const HilbertSpace& space, double tol = 1e-9);

/// Anisotropic Dicke model on all qubits of `space`. In the interaction
/// picture: g_r aJ₊e^{-i(δ₁t+φ₁)} + g_cr aJ₋e^{-i(δ₂t−φ₂)} + h.c.;
/// otherwise identical to effective_hamiltonian.
TimeDependentHamiltonian dicke_hamiltonian(const modulation::EffectiveParams& eff,
                                           const HilbertSpace& space, bool interaction_picture);

/// g(a†e^{iω̃t} + ae^{-iω̃t})Jx.
TimeDependentHamiltonian dicke_reduced_hamiltonian(double g_eff, double omega_eff,
                                                   const HilbertSpace& space);

/// The reduced form checked against eff: requires δ₁ = δ₂, g_r = g_cr and
/// zero phases within `tol` relative.
TimeDependentHamiltonian dicke_reduced_hamiltonian(const modulation::EffectiveParams& eff,
                                                   const HilbertSpace& space, double tol = 1e-9);

}  // namespace modrabi::hamiltonians
