#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace entwb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

/// Amplitudes below this magnitude are pruned from sparse containers.
inline constexpr double kDropTolerance = 1e-12;
/// Equality, rank and commutativity decisions.
inline constexpr double kTolerance = 1e-9;
/// Entropy threshold: S is quadratically flat around pure states.
inline constexpr double kEntropyTolerance = 1e-7;

inline constexpr std::size_t kMaxModes = 10;
inline constexpr int kMaxParticles = 6;
/// Largest dense first-quantized operator realized as a matrix (rows).
inline constexpr Eigen::Index kMaxDenseOperatorDim = 1024;

inline constexpr Complex kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kronecker product a ⊗ b.
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

Complex random_complex(Rng& rng);
Vector random_vector(Eigen::Index dim, Rng& rng);  // unit norm
Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Matrix random_hermitian(Eigen::Index dim, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
Matrix random_unitary(Eigen::Index dim, Rng& rng);

std::vector<double> singular_values(const Matrix& m);
double spectral_norm(const Matrix& m);
/// Number of singular values strictly above `tol`.
std::size_t numerical_rank(const std::vector<double>& singular, double tol = kTolerance);

/// Von Neumann entropy with natural logarithm; eigenvalues below
/// kDropTolerance are treated as zero.
double von_neumann_entropy(const Matrix& rho);

/// True when every column pair of `basis` is orthonormal within `tol`.
bool has_orthonormal_columns(const Matrix& basis, double tol = kTolerance);

std::uint64_t binomial(int n, int k);
std::uint64_t factorial(int n);

}  // namespace entwb
