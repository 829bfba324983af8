#pragma once

// Decision procedures for the five separability notions on pure states.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "entwb/algebra.hpp"
#include "entwb/firstq.hpp"
#include "entwb/fock.hpp"

namespace entwb {

enum class Definition { I, II, III, IV, V };

std::string_view to_string(Definition d);
/// Accepts "I".."V"; throws otherwise.
Definition parse_definition(std::string_view text);

/// tr(ρ₁²) of the normalized one-body density.
struct PurityWitness {
  double purity;
  bool operator==(const PurityWitness&) const = default;
};
/// Singular values of the two-particle coefficient matrix (Takagi or Slater spectrum).
struct SpectrumWitness {
  std::vector<double> values;
  bool operator==(const SpectrumWitness&) const = default;
};
struct SectorEntry {
  int n1;
  int n2;
  double weight;
  std::size_t rank;
  std::vector<double> schmidt;
  bool operator==(const SectorEntry&) const = default;
};
struct SectorWitness {
  std::vector<SectorEntry> sectors;
  bool operator==(const SectorWitness&) const = default;
};
struct EntropyWitness {
  double entropy;
  std::vector<double> eigenvalues;
  bool operator==(const EntropyWitness&) const = default;
};
/// Cross-partition Schmidt coefficients of the reshaped amplitude matrix.
struct SchmidtWitness {
  std::vector<double> values;
  bool operator==(const SchmidtWitness&) const = default;
};
/// Best overlap found by the brute-force separable-II search.
struct SearchWitness {
  double overlap;
  std::vector<int> occupations;
  bool operator==(const SearchWitness&) const = default;
};

using Witness = std::variant<PurityWitness, SpectrumWitness, SectorWitness, EntropyWitness, SchmidtWitness, SearchWitness>;

struct Verdict {
  Definition definition;
  bool separable;
  double tolerance;
  Witness witness;

  bool operator==(const Verdict&) const = default;
  std::string summary() const;
};

Verdict is_separable_I(const FirstQTensor& t, Statistics stats);
Verdict is_separable_I(const StateVector& s);

struct SeparableIIOptions {
  /// Enables the search procedure for N > 2.
  bool brute_force = false;
  int restarts = 200;
  std::uint64_t seed = 1234;
};

/// N = 2: Slater rank one (fermions) or Takagi rank one / rank two with equal
/// values (bosons). N > 2 throws unless options.brute_force is set.
Verdict is_separable_II(const FirstQTensor& t, Statistics stats, const SeparableIIOptions& options = {});
Verdict is_separable_II(const StateVector& s, const SeparableIIOptions& options = {});

Verdict is_separable_III(const FirstQTensor& t, const SectorLocal& split);
Verdict is_separable_III(const StateVector& s, const SectorLocal& split);

struct ReducedX1 {
  Matrix matrix;
  double entropy;
};

/// X₁ = Σ_k a_{ψ_k}|ψ⟩⟨ψ|a†_{ψ_k} / Σ_k ‖a_{ψ_k}ψ‖² for a two-particle state.
/// kbasis columns are orthonormal vectors spanning 𝒦. Throws when the state
/// has no support meeting 𝒦.
ReducedX1 reduced_X1(const FirstQTensor& t, Statistics stats, const Matrix& kbasis);
ReducedX1 reduced_X1(const StateVector& s, const Matrix& kbasis);
Verdict is_entangled_IV(const FirstQTensor& t, Statistics stats, const Matrix& kbasis);
Verdict is_entangled_IV(const StateVector& s, const Matrix& kbasis);

/// Rank of the amplitude matrix indexed by left-mode × right-mode occupations.
Verdict is_separable_V(const StateVector& s, const ModeBipartition& bip);

/// 4 Var(G) for a normalized pure state and Hermitian generator.
double qfi_phase(const StateVector& s, const OperatorExpr& g);
double qfi_phase(const FirstQTensor& t, const Matrix& g);

}  // namespace entwb
