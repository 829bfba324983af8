#pragma once

// First-quantized N-particle tensors over a d-dimensional single-particle
// space. Storage is dense and row-major with slot 0 most significant, so the
// product ψ_0 ⊗ ψ_1 ⊗ ... has the same layout as kron(ψ_0, kron(ψ_1, ...)).

#include <vector>

#include "entwb/fock.hpp"
#include "entwb/numeric.hpp"

namespace entwb {

enum class SymTag { None, Symmetric, Antisymmetric };

inline SymTag tag_for(Statistics s) { return s == Statistics::Bose ? SymTag::Symmetric : SymTag::Antisymmetric; }

/// A permutation of {0..N-1}, p[j] = π(j).
using Permutation = std::vector<int>;

bool is_permutation(const Permutation& p);
int permutation_sign(const Permutation& p);
std::vector<Permutation> all_permutations(int n);

class FirstQTensor {
 public:
  /// Throws if the size is not dim^particles or a set tag does not hold.
  FirstQTensor(int dim, int particles, Vector amps, SymTag tag = SymTag::None);

  static FirstQTensor product(const std::vector<Vector>& factors);
  static FirstQTensor basis_product(int dim, const std::vector<int>& indices);

  int dim() const noexcept { return dim_; }
  int particles() const noexcept { return particles_; }
  const Vector& amps() const noexcept { return amps_; }
  SymTag tag() const noexcept { return tag_; }
  Eigen::Index size() const noexcept { return amps_.size(); }

  Eigen::Index flat_index(const std::vector<int>& indices) const;
  std::vector<int> multi_index(Eigen::Index flat) const;
  Complex at(const std::vector<int>& indices) const { return amps_(flat_index(indices)); }

  double norm() const { return amps_.norm(); }
  FirstQTensor normalized() const;
  /// Whether exchanging adjacent slots multiplies amps by ±1 within tol.
  bool has_symmetry(SymTag tag, double tol = kTolerance) const;

  friend FirstQTensor operator+(const FirstQTensor& a, const FirstQTensor& b);
  friend FirstQTensor operator-(const FirstQTensor& a, const FirstQTensor& b);
  friend FirstQTensor operator*(Complex c, const FirstQTensor& t);

 private:
  int dim_;
  int particles_;
  Vector amps_;
  SymTag tag_;
};

/// a ⊗ b: slots of a followed by slots of b.
FirstQTensor tensor(const FirstQTensor& a, const FirstQTensor& b);

/// Output slot j holds the content of input slot π(j). Composition rule:
/// permute(σ, permute(π, t)) == permute(π∘σ, t) with (π∘σ)(j) = π(σ(j)).
FirstQTensor permute(const Permutation& pi, const FirstQTensor& t);
/// (1/N!) Σ_π (±1)^π Π_π t with the sign given by the statistics.
FirstQTensor symmetrize(const FirstQTensor& t, Statistics stat);

/// Matrix of Π_π on (ℂ^d)^⊗N.
Matrix permutation_matrix(const Permutation& pi, int dim);
Matrix symmetrizer_matrix(int dim, int particles, Statistics stat);
/// Σ_π ⊗_j O_{π(j)}; note 𝒫(O,𝟙,...,𝟙) = (N−1)! Σ_j O^{(j)}.
Matrix sym_operator(const std::vector<Matrix>& ops);
/// ⊗_j ops[j] as a dense matrix.
Matrix local_operator(const std::vector<Matrix>& ops);

/// Applies a d×d matrix to one slot.
FirstQTensor apply_on_slot(const Matrix& op, int slot, const FirstQTensor& t);
/// Applies U to every slot, U^⊗N t.
FirstQTensor apply_each(const Matrix& u, const FirstQTensor& t);
FirstQTensor apply(const Matrix& op, const FirstQTensor& t);
Complex expectation(const FirstQTensor& t, const Matrix& op);
Complex inner(const FirstQTensor& a, const FirstQTensor& b);

/// Single-particle reduced density matrix: trace over all slots but the first.
Matrix one_body_density(const FirstQTensor& t);

/// Fock amplitude c_n = √(N!/Π n_i!) · t[sorted indices]. Requires the tensor
/// to be numerically (anti)symmetric according to the catalog statistics.
StateVector to_fock(const FirstQTensor& t, const ModeCatalog& catalog);
/// Inverse of to_fock on a single particle-number sector.
FirstQTensor from_fock(const StateVector& s);

/// Single-particle space factored as external × internal, flat = ext·d_int + int.
struct SingleParticleBasis {
  std::vector<std::string> external;
  std::vector<std::string> internal;

  int dim() const { return static_cast<int>(external.size() * internal.size()); }
  int flat(int ext, int in) const { return ext * static_cast<int>(internal.size()) + in; }
  /// Labels "(e,i)" in flat order.
  std::vector<std::string> labels() const;
};

/// The isomorphism U: √(N!)·𝔖[⊗_j |ψ_j,σ_j⟩] ↦ ⊗_j |σ_j⟩. ext_states are
/// pairwise orthonormal vectors of the external factor. Throws when t has
/// weight outside the domain of U.
FirstQTensor effective_distinguish(const FirstQTensor& t, const std::vector<Vector>& ext_states, int internal_dim);

/// A populated (n1, n2) sector after splitting the single-particle space into
/// V1 ⊕ V2. `block` is the normalized image in 𝔥_{n1} ⊗ 𝔥_{n2} with rows
/// indexed by the n1 slots in V1 and columns by the n2 slots in V2.
struct SectorBlock {
  int n1;
  int n2;
  double weight;
  Matrix block;
};

/// Sectors with weight below min_weight are omitted.
std::vector<SectorBlock> split_by_subspaces(const FirstQTensor& t, const Matrix& v1, const Matrix& v2,
                                            double min_weight = kTolerance);

}  // namespace entwb
