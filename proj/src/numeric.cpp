#include "entwb/numeric.hpp"

#include <cmath>

namespace entwb {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

Complex random_complex(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

Vector random_vector(Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = random_complex(rng);
  return v / v.norm();
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = random_complex(rng);
  }
  return m;
}

Matrix random_hermitian(Eigen::Index dim, Rng& rng) {
  const Matrix g = random_matrix(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

Matrix random_unitary(Eigen::Index dim, Rng& rng) {
  const Matrix g = random_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

std::vector<double> singular_values(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double spectral_norm(const Matrix& m) {
  const auto s = singular_values(m);
  return s.empty() ? 0.0 : s.front();
}

std::size_t numerical_rank(const std::vector<double>& singular, double tol) {
  std::size_t rank = 0;
  for (double s : singular) {
    if (s > tol) ++rank;
  }
  return rank;
}

double von_neumann_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double p = eig.eigenvalues()(i);
    if (p > kDropTolerance) s -= p * std::log(p);
  }
  return s;
}

bool has_orthonormal_columns(const Matrix& basis, double tol) {
  if (basis.cols() == 0) return true;
  const Matrix gram = basis.adjoint() * basis;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= tol;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return out;
}

std::uint64_t factorial(int n) {
  std::uint64_t out = 1;
  for (int i = 2; i <= n; ++i) out *= static_cast<std::uint64_t>(i);
  return out;
}

}  // namespace entwb
