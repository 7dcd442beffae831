#include "modrabi/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modrabi/errors.hpp"

namespace modrabi::hamiltonians {

using modulation::DriveParams;
using modulation::EffectiveParams;
using modulation::SystemParams;
using quantum::PauliKind;

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Lab: return "lab";
    case ModelKind::RotatedExact: return "rotated_exact";
    case ModelKind::Effective: return "effective";
    case ModelKind::QRM: return "qrm";
    case ModelKind::JC: return "jc";
    case ModelKind::AJC: return "ajc";
    case ModelKind::DegenerateAQRM: return "degenerate_aqrm";
    case ModelKind::Dicke: return "dicke";
    case ModelKind::DickeReduced: return "dicke_reduced";
    case ModelKind::Custom: return "custom";
  }
  return "custom";
}

TimeDependentHamiltonian::TimeDependentHamiltonian(HilbertSpace space, std::vector<Term> terms,
                                                   Descriptor descriptor)
    : space_(space), terms_(std::move(terms)), descriptor_(std::move(descriptor)) {
  for (const auto& term : terms_) {
    if (!(term.op.space() == space_)) throw ValidationError("hamiltonian term lives on a different space");
    if (!term.hermitian_pair && !term.coefficient && !term.op.is_hermitian()) {
      throw ValidationError("constant hamiltonian term must be Hermitian");
    }
  }
}

TimeDependentHamiltonian TimeDependentHamiltonian::constant(Operator op, Descriptor descriptor) {
  HilbertSpace space = op.space();
  std::vector<Term> terms;
  terms.push_back(Term{std::move(op), {}, false});
  return TimeDependentHamiltonian(space, std::move(terms), std::move(descriptor));
}

bool TimeDependentHamiltonian::is_constant() const noexcept {
  return std::none_of(terms_.begin(), terms_.end(), [](const Term& t) { return bool(t.coefficient); });
}

Operator TimeDependentHamiltonian::evaluate(double t) const {
  Matrix h = Matrix::Zero(space_.dim(), space_.dim());
  for (const auto& term : terms_) {
    const Complex c = term.coefficient ? term.coefficient(t) : Complex(1.0);
    if (term.hermitian_pair) {
      h += c * term.op.matrix();
      h += std::conj(c) * term.op.matrix().adjoint();
    } else {
      h += c * term.op.matrix();
    }
  }
  return Operator(space_, std::move(h));
}

// ---- frame --------------------------------------------------------------------

FramePhases::FramePhases(const HilbertSpace& space, const SystemParams& sys, const DriveParams& drive)
    : space_(space), drive_(drive) {
  const EffectiveParams eff = modulation::effective_params(sys, drive);
  const auto n = static_cast<std::size_t>(space.dim());
  rates_.resize(n);
  drive_weights_.resize(n);
  for (Index i = 0; i < space.dim(); ++i) {
    const double s = space.total_sigma_z(i);
    const double photons = space.fock_level(i);
    rates_[static_cast<std::size_t>(i)] =
        (eff.omega_eff - sys.omega) * photons + 0.5 * s * (eff.epsilon_eff - sys.epsilon);
    drive_weights_[static_cast<std::size_t>(i)] = -s;
  }
}

double FramePhases::drive_phase(double t) const {
  return drive_.eta1 * std::sin(drive_.omega1 * t + drive_.phi1) +
         drive_.eta2 * std::sin(drive_.omega2 * t + drive_.phi2);
}

double FramePhases::phase(Index i, double t) const {
  const auto k = static_cast<std::size_t>(i);
  return rates_[k] * t + drive_weights_[k] * drive_phase(t);
}

Operator FramePhases::unitary(double t) const {
  Vector diagonal(space_.dim());
  const double s = drive_phase(t);
  for (Index i = 0; i < space_.dim(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    diagonal(i) = std::exp(kI * (rates_[k] * t + drive_weights_[k] * s));
  }
  return Operator(space_, diagonal.asDiagonal());
}

// ---- builders -------------------------------------------------------------------

namespace {

void require_resonator(const HilbertSpace& space) {
  if (!space.has_resonator() || space.n_qubits() < 1) {
    throw ValidationError("hamiltonian requires a qubit ⊗ resonator space");
  }
}

std::map<std::string, double> effective_record(const EffectiveParams& eff) {
  return {{"g_r", eff.g_r},
          {"g_cr", eff.g_cr},
          {"omega_eff", eff.omega_eff},
          {"epsilon_eff", eff.epsilon_eff},
          {"phi1", eff.phi1},
          {"phi2", eff.phi2}};
}

Operator static_part(const HilbertSpace& space, double omega, double epsilon) {
  return quantum::number(space) * Complex(omega) +
         quantum::collective_operator(space, PauliKind::Z) * Complex(0.5 * epsilon);
}

// Constant effective coupling with explicit phases on both couplings.
Operator anisotropic_coupling(const HilbertSpace& space, double g_r, double phi1, double g_cr,
                              double phi2) {
  const Operator a = quantum::annihilation(space);
  const Operator rt = a * quantum::collective_operator(space, PauliKind::Plus) *
                      (g_r * std::exp(-kI * phi1));
  const Operator crt = a * quantum::collective_operator(space, PauliKind::Minus) *
                       (g_cr * std::exp(kI * phi2));
  return rt + rt.adjoint() + crt + crt.adjoint();
}

TimeDependentHamiltonian build_effective(const EffectiveParams& eff, const HilbertSpace& space,
                                         double g_r, double g_cr, double phi1, double phi2,
                                         ModelKind kind) {
  require_resonator(space);
  Operator h = static_part(space, eff.omega_eff, eff.epsilon_eff) +
               anisotropic_coupling(space, g_r, phi1, g_cr, phi2);
  Descriptor d{kind, effective_record(eff), 0.0};
  return TimeDependentHamiltonian::constant(std::move(h), std::move(d));
}

bool negligible(double value, double scale, double tol) {
  return std::abs(value) <= tol * scale || (scale == 0.0 && value == 0.0);
}

}  // namespace

TimeDependentHamiltonian lab_hamiltonian(const SystemParams& sys, const DriveParams& drive,
                                         const HilbertSpace& space) {
  require_resonator(space);
  const Operator a = quantum::annihilation(space);
  Operator h0 = static_part(space, sys.omega, sys.epsilon) +
                (a + a.adjoint()) * quantum::collective_operator(space, PauliKind::X) * Complex(sys.g);

  std::vector<Term> terms;
  terms.push_back(Term{std::move(h0), {}, false});
  terms.push_back(Term{quantum::collective_operator(space, PauliKind::Z),
                       [drive](double t) {
                         return Complex(drive.omega1 * drive.eta1 * std::cos(drive.omega1 * t + drive.phi1) +
                                        drive.omega2 * drive.eta2 * std::cos(drive.omega2 * t + drive.phi2));
                       },
                       false});

  Descriptor d{ModelKind::Lab,
               {{"epsilon", sys.epsilon}, {"omega", sys.omega}, {"g", sys.g},
                {"omega1", drive.omega1}, {"omega2", drive.omega2},
                {"eta1", drive.eta1}, {"eta2", drive.eta2}},
               std::max({drive.omega1, drive.omega2, sys.epsilon + sys.omega})};
  return TimeDependentHamiltonian(space, std::move(terms), std::move(d));
}

TimeDependentHamiltonian rotated_hamiltonian(const SystemParams& sys, const DriveParams& drive,
                                             const HilbertSpace& space) {
  require_resonator(space);
  const EffectiveParams eff = modulation::effective_params(sys, drive);
  // aσ₊ lowers n by one and raises s by two; aσ₋ lowers both.
  const double rate_plus = (eff.omega_eff - sys.omega) - (eff.epsilon_eff - sys.epsilon);
  const double rate_minus = (eff.omega_eff - sys.omega) + (eff.epsilon_eff - sys.epsilon);
  const auto drive_phase = [drive](double t) {
    return drive.eta1 * std::sin(drive.omega1 * t + drive.phi1) +
           drive.eta2 * std::sin(drive.omega2 * t + drive.phi2);
  };

  const Operator a = quantum::annihilation(space);
  std::vector<Term> terms;
  terms.push_back(Term{static_part(space, eff.omega_eff, eff.epsilon_eff), {}, false});
  terms.push_back(Term{a * quantum::collective_operator(space, PauliKind::Plus) * Complex(sys.g),
                       [=](double t) { return std::exp(kI * (rate_plus * t + 2.0 * drive_phase(t))); },
                       true});
  terms.push_back(Term{a * quantum::collective_operator(space, PauliKind::Minus) * Complex(sys.g),
                       [=](double t) { return std::exp(kI * (rate_minus * t - 2.0 * drive_phase(t))); },
                       true});

  Descriptor d{ModelKind::RotatedExact, effective_record(eff),
               std::max(sys.epsilon + sys.omega, drive.omega1 + drive.omega2)};
  d.parameters["g"] = sys.g;
  d.parameters["omega1"] = drive.omega1;
  d.parameters["omega2"] = drive.omega2;
  d.parameters["eta1"] = drive.eta1;
  d.parameters["eta2"] = drive.eta2;
  return TimeDependentHamiltonian(space, std::move(terms), std::move(d));
}

TimeDependentHamiltonian effective_hamiltonian(const EffectiveParams& eff, const HilbertSpace& space) {
  return build_effective(eff, space, eff.g_r, eff.g_cr, eff.phi1, eff.phi2, ModelKind::Effective);
}

TimeDependentHamiltonian model(ModelKind kind, const EffectiveParams& eff, const HilbertSpace& space,
                               double tol) {
  const double scale = std::max(std::abs(eff.g_r), std::abs(eff.g_cr));
  const auto fail = [kind](const std::string& why) {
    throw ValidationError(std::string("model ") + to_string(kind) + ": " + why);
  };
  switch (kind) {
    case ModelKind::QRM:
      if (!negligible(eff.g_r - eff.g_cr, scale, tol)) fail("requires g_r = g_cr");
      if (std::abs(eff.phi1) > tol || std::abs(eff.phi2) > tol) fail("requires zero phases");
      return build_effective(eff, space, eff.g_r, eff.g_r, 0.0, 0.0, kind);
    case ModelKind::JC:
      if (!negligible(eff.g_cr, scale, tol)) fail("requires g_cr = 0");
      return build_effective(eff, space, eff.g_r, 0.0, eff.phi1, 0.0, kind);
    case ModelKind::AJC:
      if (!negligible(eff.g_r, scale, tol)) fail("requires g_r = 0");
      return build_effective(eff, space, 0.0, eff.g_cr, 0.0, eff.phi2, kind);
    case ModelKind::DegenerateAQRM:
      if (!negligible(eff.omega_eff, scale, tol) || !negligible(eff.epsilon_eff, scale, tol)) {
        fail("requires delta1 = delta2 = 0");
      }
      {
        EffectiveParams degenerate = eff;
        degenerate.omega_eff = 0.0;
        degenerate.epsilon_eff = 0.0;
        return build_effective(degenerate, space, eff.g_r, eff.g_cr, eff.phi1, eff.phi2, kind);
      }
    default:
      fail("not an effective-model specialization");
  }
  return effective_hamiltonian(eff, space);
}

TimeDependentHamiltonian dicke_hamiltonian(const EffectiveParams& eff, const HilbertSpace& space,
                                           bool interaction_picture) {
  if (!interaction_picture) {
    return build_effective(eff, space, eff.g_r, eff.g_cr, eff.phi1, eff.phi2, ModelKind::Dicke);
  }
  require_resonator(space);
  const Operator a = quantum::annihilation(space);
  const double delta1 = eff.delta1();
  const double delta2 = eff.delta2();
  const double phi1 = eff.phi1;
  const double phi2 = eff.phi2;
  std::vector<Term> terms;
  terms.push_back(Term{a * quantum::collective_operator(space, PauliKind::Plus) * Complex(eff.g_r),
                       [=](double t) { return std::exp(-kI * (delta1 * t + phi1)); }, true});
  terms.push_back(Term{a * quantum::collective_operator(space, PauliKind::Minus) * Complex(eff.g_cr),
                       [=](double t) { return std::exp(-kI * (delta2 * t - phi2)); }, true});
  Descriptor d{ModelKind::Dicke, effective_record(eff), std::max(std::abs(delta1), std::abs(delta2))};
  d.parameters["interaction_picture"] = 1.0;
  return TimeDependentHamiltonian(space, std::move(terms), std::move(d));
}

TimeDependentHamiltonian dicke_reduced_hamiltonian(double g_eff, double omega_eff, const HilbertSpace& space) {
  require_resonator(space);
  std::vector<Term> terms;
  terms.push_back(Term{quantum::creation(space) * quantum::collective_operator(space, PauliKind::X) *
                           Complex(g_eff),
                       [omega_eff](double t) { return std::exp(kI * (omega_eff * t)); }, true});
  Descriptor d{ModelKind::DickeReduced, {{"g_eff", g_eff}, {"omega_eff", omega_eff}}, std::abs(omega_eff)};
  return TimeDependentHamiltonian(space, std::move(terms), std::move(d));
}

TimeDependentHamiltonian dicke_reduced_hamiltonian(const EffectiveParams& eff, const HilbertSpace& space,
                                                   double tol) {
  const double scale = std::max({std::abs(eff.g_r), std::abs(eff.g_cr), std::abs(eff.omega_eff)});
  if (!negligible(eff.delta1() - eff.delta2(), scale, tol)) {
    throw ValidationError("reduced Dicke form requires delta1 = delta2");
  }
  if (!negligible(eff.g_r - eff.g_cr, scale, tol)) {
    throw ValidationError("reduced Dicke form requires g_r = g_cr");
  }
  if (std::abs(eff.phi1) > tol || std::abs(eff.phi2) > tol) {
    throw ValidationError("reduced Dicke form requires zero drive phases");
  }
  return dicke_reduced_hamiltonian(eff.g_r, eff.omega_eff, space);
}

}  // namespace modrabi::hamiltonians
