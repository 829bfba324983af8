#pragma once

// Observables as complex-weighted sums of normally ordered ladder monomials.
//
// Canonical monomial: creators in ascending mode order to the left of
// annihilators in descending mode order, so a monomial and its adjoint are
// both canonical. Products are re-normal-ordered with a_i a†_j = δ_ij + η a†_j a_i.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "entwb/fock.hpp"
#include "entwb/numeric.hpp"

namespace entwb {

struct Monomial {
  std::vector<int> creators;
  std::vector<int> annihilators;

  int degree() const { return static_cast<int>(creators.size() + annihilators.size()); }
  /// Change in particle number.
  int charge() const { return static_cast<int>(creators.size()) - static_cast<int>(annihilators.size()); }
  auto operator<=>(const Monomial&) const = default;
};

class OperatorExpr {
 public:
  using Terms = std::map<Monomial, Complex>;

  explicit OperatorExpr(ModeCatalog catalog);
  /// Each key must already be normally ordered (creators left of
  /// annihilators); index order inside each group is canonicalized.
  OperatorExpr(ModeCatalog catalog, const std::vector<std::pair<Monomial, Complex>>& terms);

  static OperatorExpr scalar(const ModeCatalog& catalog, Complex c);
  static OperatorExpr identity(const ModeCatalog& catalog) { return scalar(catalog, 1.0); }
  static OperatorExpr create(const ModeCatalog& catalog, int mode);
  static OperatorExpr annihilate(const ModeCatalog& catalog, int mode);
  static OperatorExpr number(const ModeCatalog& catalog, int mode);

  const ModeCatalog& catalog() const noexcept { return catalog_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::vector<int> modes() const;

  OperatorExpr adjoint() const;
  bool is_hermitian(double tol = kTolerance) const;
  /// Largest |coefficient| difference between two expressions.
  double distance(const OperatorExpr& other) const;

  friend OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator*(Complex c, const OperatorExpr& a);
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);

  std::string to_string() const;

 private:
  void add_term(Monomial m, Complex c);

  ModeCatalog catalog_;
  Terms terms_;
};

OperatorExpr multiply(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b);

/// Σ_{ij} O(i,j) a†_i a_j.
OperatorExpr lift_single_particle(const Matrix& o, const ModeCatalog& catalog);

StateVector apply(const OperatorExpr& op, const StateVector& s);
/// ⟨s|op|s⟩. The state is used as given; callers normalize.
Complex expectation(const StateVector& s, const OperatorExpr& op);

/// Matrix of op from the `particles` sector into the sector particles + charge,
/// in sector_basis order. Throws if op mixes charges.
Matrix sector_matrix(const OperatorExpr& op, int particles);
/// Operator norm of op restricted to the input sector `particles`; output
/// may land in several sectors.
double restricted_norm(const OperatorExpr& op, int particles);
double commutator_norm(const OperatorExpr& a, const OperatorExpr& b, int particles);

/// Two commuting single-particle operators (particle locality).
struct ParticleLocalPair {
  Matrix o1;
  Matrix o2;
};
/// Disjoint mode index sets covering the catalog (mode locality).
struct ModeBipartition {
  std::vector<int> left;
  std::vector<int> right;
};
/// Orthonormal bases of two orthogonal complementary single-particle subspaces.
struct SectorLocal {
  Matrix v1;
  Matrix v2;
};

using SubalgebraSpec = std::variant<ParticleLocalPair, ModeBipartition, SectorLocal>;

/// Validates the structural invariants; throws entwb::Error on violation.
ParticleLocalPair make_particle_local_pair(Matrix o1, Matrix o2);
ModeBipartition make_mode_bipartition(std::vector<int> left, std::vector<int> right, std::size_t modes);
SectorLocal make_sector_local(Matrix v1, Matrix v2);

}  // namespace entwb
