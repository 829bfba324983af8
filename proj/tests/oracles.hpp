#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library beyond its basic types.

#include <algorithm>
#include <cmath>
#include <vector>

#include "entwb/fock.hpp"
#include "entwb/numeric.hpp"

namespace oracle {

using entwb::Complex;
using entwb::Matrix;
using entwb::Vector;

/// Full tensor-product Fock space with per-mode dimension `levels`
/// (2 for fermions, cutoff + 1 for bosons); mode 0 is the most significant digit.
struct DenseFock {
  int modes;
  int levels;
  bool fermi;

  Eigen::Index dim() const {
    Eigen::Index d = 1;
    for (int i = 0; i < modes; ++i) d *= levels;
    return d;
  }

  Eigen::Index index(const std::vector<int>& occ) const {
    Eigen::Index k = 0;
    for (int n : occ) k = k * levels + n;
    return k;
  }

  std::vector<int> occupation(Eigen::Index k) const {
    std::vector<int> occ(static_cast<std::size_t>(modes));
    for (int i = modes - 1; i >= 0; --i) {
      occ[static_cast<std::size_t>(i)] = static_cast<int>(k % levels);
      k /= levels;
    }
    return occ;
  }

  /// Annihilator of `mode` built from single-mode matrices and Jordan-Wigner strings.
  Matrix annihilator(int mode) const {
    Matrix local = Matrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) local(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix parity = Matrix::Identity(levels, levels);
    if (fermi) parity(1, 1) = -1.0;
    Matrix out = Matrix::Identity(1, 1);
    for (int i = 0; i < modes; ++i) {
      const Matrix& f = i < mode ? parity : i == mode ? local : static_cast<const Matrix&>(Matrix::Identity(levels, levels));
      Matrix next(out.rows() * f.rows(), out.cols() * f.cols());
      for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
      }
      out = next;
    }
    return out;
  }

  Vector embed(const entwb::StateVector& s) const {
    Vector v = Vector::Zero(dim());
    for (const auto& [occ, amp] : s.terms()) {
      std::vector<int> o(occ.values().begin(), occ.values().end());
      v(index(o)) = amp;
    }
    return v;
  }
};

inline double variance_qfi(const Matrix& g, const Vector& psi) {
  const Complex m1 = psi.dot(g * psi);
  const Complex m2 = psi.dot(g * (g * psi));
  return 4.0 * (m2 - m1 * m1).real();
}

inline Matrix swap_matrix(int d) {
  Matrix s = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  }
  return s;
}

inline Matrix reshape(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  }
  return m;
}

inline std::size_t rank(const Matrix& m, double tol = 1e-9) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > tol ? 1 : 0;
  return r;
}

inline Vector unit_random(Eigen::Index d, entwb::Rng& rng) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(n(rng), n(rng));
  return v.normalized();
}

/// Largest overlap |⟨φ|t⟩| of a normalized two-particle amplitude matrix C
/// (C(i,j) = t[i,j]) with normalized √2·𝔖[φ1⊗φ2] states that are separable in
/// the Slater/permanent sense: φ1 ⟂ φ2, or φ1 = φ2 for bosons. The orthonormal
/// pair is found by Armijo gradient ascent on the Stiefel manifold with random
/// restarts; the equal pair by power iteration.
inline double product_pair_overlap(const Matrix& c, bool fermi, int restarts, entwb::Rng& rng) {
  const Eigen::Index d = c.rows();
  auto value = [&](const Matrix& x) { return std::norm(x.col(0).dot(c * x.col(1).conjugate())); };
  auto retract = [](const Matrix& m) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    const Matrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < m.cols(); ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
    return q;
  };
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Matrix x(d, 2);
    x.col(0) = unit_random(d, rng);
    x.col(1) = unit_random(d, rng);
    x = retract(x);
    for (int it = 0; it < 2000; ++it) {
      const Complex g = x.col(0).dot(c * x.col(1).conjugate());
      Matrix grad(d, 2);
      grad.col(0) = std::conj(g) * (c * x.col(1).conjugate());
      grad.col(1) = std::conj(g) * (c.transpose() * x.col(0).conjugate());
      const Matrix a = x.adjoint() * grad;
      const Matrix step = grad - x * (0.5 * (a + a.adjoint()));
      const double n2 = step.squaredNorm();
      if (n2 < 1e-28) break;
      const double f = value(x);
      bool moved = false;
      for (double t = 1.0; t > 1e-16; t *= 0.5) {
        const Matrix y = retract(x + t * step);
        if (value(y) >= f + 1e-4 * t * n2) {
          x = y;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    best = std::max(best, std::sqrt(2.0 * value(x)));
    if (!fermi) {
      Vector z = unit_random(d, rng);
      for (int it = 0; it < 2000; ++it) {
        Vector nz = c * z.conjugate();
        if (nz.norm() < 1e-14) break;
        nz.normalize();
        const bool done = (nz - z).norm() < 1e-15;
        z = nz;
        if (done) break;
      }
      best = std::max(best, std::abs(z.dot(c * z.conjugate())));
    }
  }
  return best;
}

}  // namespace oracle
