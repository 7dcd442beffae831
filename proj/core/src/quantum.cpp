#include "modrabi/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "modrabi/errors.hpp"

namespace modrabi::quantum {
namespace {

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string(what) + ": Hilbert spaces differ");
}

Matrix pauli_matrix(PauliKind kind) {
  Matrix m = Matrix::Zero(2, 2);
  switch (kind) {
    case PauliKind::Z:
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      break;
    case PauliKind::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliKind::Y:
      m(0, 1) = kI;
      m(1, 0) = -kI;
      break;
    case PauliKind::Plus:
      m(1, 0) = 1.0;
      break;
    case PauliKind::Minus:
      m(0, 1) = 1.0;
      break;
  }
  return m;
}

Matrix ladder(int cutoff) {
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix embed_qubit(const HilbertSpace& space, int which, const Matrix& single) {
  const Index before = Index{1} << which;
  const Index after = (Index{1} << (space.n_qubits() - which - 1)) * space.fock_cutoff();
  return kron(kron(Matrix::Identity(before, before), single), Matrix::Identity(after, after));
}

Matrix embed_resonator(const HilbertSpace& space, const Matrix& single) {
  return kron(Matrix::Identity(space.qubit_dim(), space.qubit_dim()), single);
}

void require_resonator(const HilbertSpace& space, const char* what) {
  if (!space.has_resonator()) throw ValidationError(std::string(what) + ": space has no resonator");
}

}  // namespace

// ---- HilbertSpace -----------------------------------------------------------

HilbertSpace::HilbertSpace(int n_qubits, int fock_cutoff)
    : n_qubits_(n_qubits), fock_cutoff_(fock_cutoff) {
  if (n_qubits < 1) throw ValidationError("HilbertSpace: n_qubits must be >= 1");
  if (n_qubits > 16) throw ValidationError("HilbertSpace: n_qubits must be <= 16");
  if (fock_cutoff < 2) throw ValidationError("HilbertSpace: fock_cutoff must be >= 2");
}

HilbertSpace HilbertSpace::qubits_only(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 16) throw ValidationError("qubits_only: n_qubits out of range");
  return HilbertSpace(n_qubits, 1, Unchecked{});
}

HilbertSpace HilbertSpace::resonator_only(int fock_cutoff) {
  if (fock_cutoff < 2) throw ValidationError("resonator_only: fock_cutoff must be >= 2");
  return HilbertSpace(0, fock_cutoff, Unchecked{});
}

Index HilbertSpace::index(std::span<const QubitLevel> qubits, int fock) const {
  if (static_cast<int>(qubits.size()) != n_qubits_) {
    throw ValidationError("HilbertSpace::index: wrong number of qubit levels");
  }
  if (fock < 0 || fock >= fock_cutoff_) throw ValidationError("HilbertSpace::index: Fock level out of range");
  Index q = 0;
  for (QubitLevel level : qubits) q = 2 * q + static_cast<int>(level);
  return q * fock_cutoff_ + fock;
}

Index HilbertSpace::index(QubitLevel qubit, int fock) const {
  const QubitLevel levels[] = {qubit};
  return index(levels, fock);
}

QubitLevel HilbertSpace::qubit_level(Index i, int which) const {
  if (which < 0 || which >= n_qubits_) throw ValidationError("qubit_level: qubit index out of range");
  const Index q = i / fock_cutoff_;
  return static_cast<QubitLevel>((q >> (n_qubits_ - which - 1)) & 1);
}

int HilbertSpace::total_sigma_z(Index i) const {
  const Index q = i / fock_cutoff_;
  int excited = 0;
  for (int k = 0; k < n_qubits_; ++k) excited += static_cast<int>((q >> k) & 1);
  return 2 * excited - n_qubits_;
}

HilbertSpace HilbertSpace::qubit_factor() const { return qubits_only(n_qubits_); }

HilbertSpace HilbertSpace::resonator_factor() const {
  if (!has_resonator()) throw ValidationError("resonator_factor: space has no resonator");
  return resonator_only(fock_cutoff_);
}

// ---- Operator ----------------------------------------------------------------

Operator::Operator(HilbertSpace space, Matrix matrix) : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw ValidationError("Operator: matrix dimension does not match the space");
  }
}

Operator Operator::zero(const HilbertSpace& space) {
  return Operator(space, Matrix::Zero(space.dim(), space.dim()));
}

Operator Operator::identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.dim(), space.dim()));
}

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::is_unitary(double tol) const {
  const Matrix defect = matrix_.adjoint() * matrix_ - Matrix::Identity(space_.dim(), space_.dim());
  return defect.cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_space(space_, other.space_, "Operator +");
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_space(space_, other.space_, "Operator -");
  matrix_ -= other.matrix_;
  return *this;
}

Operator& Operator::operator*=(Complex scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space(), rhs.space(), "Operator *");
  return Operator(lhs.space(), lhs.matrix() * rhs.matrix());
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

namespace {
HilbertSpace tensor_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (a.has_resonator()) throw ValidationError("tensor: left factor must be qubits-only");
  const int n = a.n_qubits() + b.n_qubits();
  return b.has_resonator() ? HilbertSpace(n, b.fock_cutoff()) : HilbertSpace::qubits_only(n);
}
}  // namespace

Operator tensor(const Operator& a, const Operator& b) {
  return Operator(tensor_space(a.space(), b.space()), kron(a.matrix(), b.matrix()));
}

// ---- States -------------------------------------------------------------------

PureState::PureState(HilbertSpace space, Vector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.dim()) throw ValidationError("PureState: dimension mismatch");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) throw ValidationError("PureState: amplitudes are not unit norm");
}

PureState PureState::normalized(HilbertSpace space, Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("PureState::normalized: zero or non-finite vector");
  amplitudes /= norm;
  return PureState(space, std::move(amplitudes));
}

PureState PureState::basis(const HilbertSpace& space, Index i) {
  if (i < 0 || i >= space.dim()) throw ValidationError("PureState::basis: index out of range");
  Vector v = Vector::Zero(space.dim());
  v(i) = 1.0;
  return PureState(space, std::move(v));
}

PureState PureState::product(const HilbertSpace& space, std::span<const QubitLevel> levels, int fock) {
  return basis(space, space.index(levels, fock));
}

Complex PureState::inner(const PureState& other) const {
  require_same_space(space_, other.space_, "PureState::inner");
  return amplitudes_.dot(other.amplitudes_);
}

PureState tensor(const PureState& a, const PureState& b) {
  const HilbertSpace space = tensor_space(a.space(), b.space());
  Vector v(space.dim());
  const Index nb = b.amplitudes().size();
  for (Index i = 0; i < a.amplitudes().size(); ++i) v.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  return PureState::normalized(space, std::move(v));
}

DensityMatrix::DensityMatrix(HilbertSpace space, Matrix matrix) : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw ValidationError("DensityMatrix: dimension mismatch");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("DensityMatrix: not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > 1e-10) throw ValidationError("DensityMatrix: trace is not 1");
  if (min_eigenvalue() < -1e-8) throw ValidationError("DensityMatrix: not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  return DensityMatrix(psi.space(), psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::purity() const { return trace_product(matrix_, matrix_).real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor_space(a.space(), b.space()), kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  const HilbertSpace& space = rho.space();
  const Index nq = space.qubit_dim();
  const Index nf = space.fock_cutoff();
  const Matrix& m = rho.matrix();
  if (keep == Subsystem::Qubits) {
    if (space.n_qubits() == 0) throw ValidationError("partial_trace: space has no qubits to keep");
    Matrix out = Matrix::Zero(nq, nq);
    for (Index q = 0; q < nq; ++q)
      for (Index p = 0; p < nq; ++p)
        for (Index n = 0; n < nf; ++n) out(q, p) += m(q * nf + n, p * nf + n);
    return DensityMatrix(space.qubit_factor(), std::move(out));
  }
  require_resonator(space, "partial_trace");
  Matrix out = Matrix::Zero(nf, nf);
  for (Index q = 0; q < nq; ++q) out += m.block(q * nf, q * nf, nf, nf);
  return DensityMatrix(space.resonator_factor(), std::move(out));
}

// ---- Operator constructors --------------------------------------------------

Operator annihilation(const HilbertSpace& space) {
  require_resonator(space, "annihilation");
  return Operator(space, embed_resonator(space, ladder(space.fock_cutoff())));
}

Operator creation(const HilbertSpace& space) { return annihilation(space).adjoint(); }

Operator number(const HilbertSpace& space) {
  require_resonator(space, "number");
  Matrix n = Matrix::Zero(space.fock_cutoff(), space.fock_cutoff());
  for (int k = 0; k < space.fock_cutoff(); ++k) n(k, k) = static_cast<double>(k);
  return Operator(space, embed_resonator(space, n));
}

Operator qubit_operator(const HilbertSpace& space, int which_qubit, PauliKind kind) {
  if (which_qubit < 0 || which_qubit >= space.n_qubits()) {
    throw ValidationError("qubit_operator: qubit index " + std::to_string(which_qubit) + " out of range");
  }
  return Operator(space, embed_qubit(space, which_qubit, pauli_matrix(kind)));
}

Operator collective_operator(const HilbertSpace& space, PauliKind kind) {
  Operator sum = Operator::zero(space);
  for (int i = 0; i < space.n_qubits(); ++i) sum += qubit_operator(space, i, kind);
  return sum;
}

Operator qubit_projector(const HilbertSpace& space, int which_qubit, QubitLevel level) {
  if (which_qubit < 0 || which_qubit >= space.n_qubits()) {
    throw ValidationError("qubit_projector: qubit index out of range");
  }
  Matrix p = Matrix::Zero(2, 2);
  p(static_cast<int>(level), static_cast<int>(level)) = 1.0;
  return Operator(space, embed_qubit(space, which_qubit, p));
}

Operator top_fock_projector(const HilbertSpace& space) {
  require_resonator(space, "top_fock_projector");
  Matrix p = Matrix::Zero(space.fock_cutoff(), space.fock_cutoff());
  p(space.fock_cutoff() - 1, space.fock_cutoff() - 1) = 1.0;
  return Operator(space, embed_resonator(space, p));
}

double coherent_tail_mass(double mean_photons, int fock_cutoff) {
  if (mean_photons <= 0.0) return 0.0;
  const double log_m = std::log(mean_photons);
  double tail = 0.0;
  for (int n = fock_cutoff - 1;; ++n) {
    const double term = std::exp(-mean_photons + n * log_m - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean_photons && term < 1e-18 * std::max(tail, 1e-300)) break;
    if (n > fock_cutoff + 10000) break;
  }
  return std::min(tail, 1.0);
}

Truncated<Operator> displacement(const HilbertSpace& space, Complex xi) {
  require_resonator(space, "displacement");
  const Matrix a = ladder(space.fock_cutoff());
  const Matrix generator = xi * a.adjoint() - std::conj(xi) * a;
  Matrix d = expm(generator);
  return {Operator(space, embed_resonator(space, d)), coherent_tail_mass(std::norm(xi), space.fock_cutoff())};
}

Truncated<PureState> coherent_state(const HilbertSpace& space, Complex xi) {
  if (space.n_qubits() != 0) throw ValidationError("coherent_state: expects a resonator-only space");
  auto d = displacement(space, xi);
  Vector v = d.value.matrix().col(0);
  return {PureState::normalized(space, std::move(v)), d.tail_mass};
}

Complex trace_product(const Matrix& op, const Matrix& rho) {
  return op.transpose().cwiseProduct(rho).sum();
}

Complex expectation(const Operator& op, const PureState& psi) {
  require_same_space(op.space(), psi.space(), "expectation");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

Complex expectation(const Operator& op, const DensityMatrix& rho) {
  require_same_space(op.space(), rho.space(), "expectation");
  return trace_product(op.matrix(), rho.matrix());
}

}  // namespace modrabi::quantum
