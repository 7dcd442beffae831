#pragma once

#include <complex>

#include <Eigen/Dense>

namespace modrabi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree 3, 5, 7, 9 or 13, chosen from the 1-norm of the
/// argument (Higham's 2005 parameters). Relative accuracy is close to unit
/// roundoff for the generators used here (anti-Hermitian, norm up to ~10).
Matrix expm(const Matrix& a);

/// Kronecker product a ⊗ b with row-major composite indexing, i.e.
/// (i_a * rows(b) + i_b, j_a * cols(b) + j_b).
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace modrabi
