#include "modrabi/linalg.hpp"

#include <array>
#include <cmath>

namespace modrabi {
namespace {

double one_norm(const Matrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Padé numerator/denominator for degrees 3..9 share one structure:
// U = A * sum_{odd k} b_k A^{k-1}, V = sum_{even k} b_k A^k.
template <std::size_t M>
Matrix pade_low(const Matrix& a, const std::array<double, M + 1>& b) {
  const Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;
  Matrix u_sum = b[1] * ident;
  Matrix v = b[0] * ident;
  for (std::size_t k = 2; k <= M; k += 2) {
    power = power * a2;
    v += b[k] * power;
    if (k + 1 <= M) u_sum += b[k + 1] * power;
  }
  const Matrix u = a * u_sum;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                         b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
  const Matrix u = a * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& a) {
  const Index n = a.rows();
  if (n == 0) return a;
  const double norm = one_norm(a);

  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0,
                                               420.0,   30.0,    1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0,
                                               277200.0,   25200.0,   1512.0,
                                               56.0,       1.0};
  static constexpr std::array<double, 10> b9 = {
      17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
      2162160.0,     110880.0,     3960.0,       90.0,        1.0};

  if (norm <= 1.495585217958292e-2) return pade_low<3>(a, b3);
  if (norm <= 2.539398330063230e-1) return pade_low<5>(a, b5);
  if (norm <= 9.504178996162932e-1) return pade_low<7>(a, b7);
  if (norm <= 2.097847961257068e0) return pade_low<9>(a, b9);

  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm > theta13) {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  }
  const Matrix scaled = a / std::ldexp(1.0, squarings);
  Matrix result = pade13(scaled);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace modrabi
