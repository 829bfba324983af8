#pragma once

// Two-point correlation gaps ⟨AB⟩ − ⟨A⟩⟨B⟩ and the mixed-state factorization
// check for explicitly supplied separable decompositions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entwb/algebra.hpp"
#include "entwb/firstq.hpp"
#include "entwb/fock.hpp"

namespace entwb {

struct FactorizationReport {
  Complex lhs;
  Complex rhs;
  Complex gap;
  bool factorizes;
  /// False when ‖[A,B]‖ exceeded the tolerance; the gap is still reported.
  bool probes_commute;
  double tolerance;
};

FactorizationReport factorization_gap(const StateVector& s, const OperatorExpr& a, const OperatorExpr& b,
                                      double tol = kTolerance);
FactorizationReport factorization_gap(const FirstQTensor& t, const Matrix& a, const Matrix& b,
                                      double tol = kTolerance);

/// ρ = Σ_k q_k |χ_k⟩⟨χ_k| together with a claimed separable form
/// Σ_j p_j ρ_j^(1) ⊗ ρ_j^(2), each local factor given as a pure state on the
/// full catalog whose support lies in one side of the partition.
struct ExplicitDecomposition {
  struct MixtureTerm {
    double weight;
    StateVector state;
  };
  struct ProductTerm {
    double weight;
    StateVector first;
    StateVector second;
  };
  std::vector<MixtureTerm> mixture;
  std::vector<ProductTerm> terms;
};

/// Throws on negative weights, weights not summing to one, or unnormalized states.
void validate(const ExplicitDecomposition& d);
/// lhs = Tr(ρAB), rhs = Σ_j p_j ⟨A⟩_{j,1} ⟨B⟩_{j,2}.
FactorizationReport check_sep2(const ExplicitDecomposition& d, const OperatorExpr& a, const OperatorExpr& b,
                               double tol = kTolerance);

/// A flat record for report emitters.
struct CorrelationRecord {
  std::string state_id;
  std::string a_id;
  std::string b_id;
  FactorizationReport report;
};
std::string csv_header();
std::string to_csv(const CorrelationRecord& r);

struct ProbeSweepConfig {
  int samples = 100;
  std::uint64_t seed = 1234;
};

/// Random Hermitian element of the algebra generated by the ladder operators
/// of `modes`: constant, one-body, pairing and two-body terms.
OperatorExpr random_mode_local_probe(const ModeCatalog& catalog, const std::vector<int>& modes, Rng& rng);

/// Largest |gap| over `samples` random probe pairs (A on the left modes, B on the right).
struct ProbeSweepResult {
  ProbeSweepConfig config;
  double max_gap;
  std::vector<FactorizationReport> reports;
};
ProbeSweepResult probe_sweep(const StateVector& s, const ModeBipartition& bip, const ProbeSweepConfig& config);

/// Normalized random state with exactly `particles` quanta.
StateVector random_sector_state(const ModeCatalog& catalog, int particles, Rng& rng);
/// Normalized P(a†_left) Q(a†_right)|vac⟩ with fixed particle numbers per side.
StateVector random_product_state(const ModeCatalog& catalog, const ModeBipartition& bip, int left_particles,
                                 int right_particles, Rng& rng);

/// ψ⊗ψ with ψ = (e_λ + e_κ)/√2 built from common eigenvectors of the pair,
/// choosing λ,κ with the largest |Δo1 Δo2|. Empty if O1 or O2 is ∝ 𝟙.
std::optional<FirstQTensor> separable_I_counterexample(const ParticleLocalPair& pair);

}  // namespace entwb
