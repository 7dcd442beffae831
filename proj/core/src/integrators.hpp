#pragma once

#include <functional>
#include <vector>

#include <Eigen/SparseCore>

#include "modrabi/dynamics.hpp"

namespace modrabi::dynamics::detail {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Sum of Hamiltonian terms (plus an optional constant non-Hermitian part)
/// compiled onto one sparsity pattern. at(t) refills the values in place.
class CompiledOperator {
 public:
  explicit CompiledOperator(const TimeDependentHamiltonian& h, const Matrix* constant_extra = nullptr);

  const SparseMatrix& at(double t);
  bool is_constant() const noexcept { return constant_; }

 private:
  struct Entry {
    Index slot;
    Complex value;
  };
  struct CompiledTerm {
    std::function<Complex(double)> coefficient;
    std::vector<Entry> direct;
    std::vector<Entry> adjoint;  // values already conjugated
  };

  SparseMatrix matrix_;
  std::vector<Complex> constant_values_;
  std::vector<CompiledTerm> terms_;
  bool constant_ = true;
  bool filled_ = false;
};

using Rhs = std::function<void(double t, const Matrix& y, Matrix& dy)>;
/// Called at every grid sample; may modify the state in place.
using Observer = std::function<void(std::size_t sample, double t, Matrix& y)>;

struct StepStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double min_step = 0.0;
};

StepStats integrate(const Rhs& rhs, Matrix& y, const std::vector<double>& samples, const IntegratorConfig& cfg,
                    double nominal_dt, const Observer& observe);

}  // namespace modrabi::dynamics::detail
