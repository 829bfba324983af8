#pragma once

// Occupation-number representation of few-mode Fock states.
//
// Fermionic signs follow the Jordan-Wigner string relative to the catalog
// order: a†_m picks up (-1)^(n_0 + ... + n_{m-1}). Consequently the basis
// vector |n⟩ equals the creation monomial with ascending mode indices applied
// to the vacuum, a†_{i1} a†_{i2} ... a†_{iN} |vac⟩ with i1 < i2 < ... < iN.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "entwb/numeric.hpp"

namespace entwb {

enum class Statistics { Bose, Fermi };

std::string_view to_string(Statistics s);
/// +1 for bosons, -1 for fermions (the η of the exchange relations).
inline int exchange_sign(Statistics s) { return s == Statistics::Bose ? 1 : -1; }

class ModeCatalog {
 public:
  ModeCatalog(std::vector<std::string> labels, Statistics statistics);

  std::size_t size() const noexcept { return data_->labels.size(); }
  Statistics statistics() const noexcept { return data_->statistics; }
  const std::vector<std::string>& labels() const noexcept { return data_->labels; }
  const std::string& label(std::size_t mode) const;

  std::optional<std::size_t> find(std::string_view label) const;
  /// Throws entwb::Error for unknown labels.
  std::size_t index_of(std::string_view label) const;

  friend bool operator==(const ModeCatalog& a, const ModeCatalog& b);

 private:
  struct Data {
    std::vector<std::string> labels;
    Statistics statistics;
  };
  std::shared_ptr<const Data> data_;
};

class OccupationState {
 public:
  OccupationState() = default;
  explicit OccupationState(std::vector<std::uint8_t> occupations) : occ_(std::move(occupations)) {}
  static OccupationState empty(std::size_t modes) { return OccupationState(std::vector<std::uint8_t>(modes, 0)); }

  std::size_t size() const noexcept { return occ_.size(); }
  int operator[](std::size_t mode) const { return occ_.at(mode); }
  int total() const;
  const std::vector<std::uint8_t>& values() const noexcept { return occ_; }
  OccupationState with(std::size_t mode, int n) const;

  auto operator<=>(const OccupationState&) const = default;

  std::string to_string() const;

 private:
  std::vector<std::uint8_t> occ_;
};

/// A basis term after a single ladder operator: new occupations and the
/// scalar factor (√n for bosons, Jordan-Wigner sign for fermions).
struct LadderResult {
  OccupationState state;
  double factor;
};

std::optional<LadderResult> create_on(const OccupationState& occ, std::size_t mode, Statistics stats);
std::optional<LadderResult> annihilate_on(const OccupationState& occ, std::size_t mode, Statistics stats);

/// Sparse complex amplitudes over occupation states. Immutable.
class StateVector {
 public:
  using Terms = std::map<OccupationState, Complex>;

  explicit StateVector(ModeCatalog catalog, Terms terms = {});

  const ModeCatalog& catalog() const noexcept { return catalog_; }
  const Terms& terms() const noexcept { return terms_; }
  Complex amplitude(const OccupationState& occ) const;
  bool empty() const noexcept { return terms_.empty(); }

  double norm() const;
  /// Throws for the zero vector.
  StateVector normalized() const;

  std::set<int> particle_numbers() const;
  /// The particle number when the state lives in a single sector.
  std::optional<int> particle_number() const;
  StateVector project_sector(int particles) const;

  friend StateVector operator+(const StateVector& a, const StateVector& b);
  friend StateVector operator-(const StateVector& a, const StateVector& b);
  friend StateVector operator*(Complex c, const StateVector& s);

  std::string to_string() const;

 private:
  ModeCatalog catalog_;
  Terms terms_;
};

StateVector vacuum(const ModeCatalog& catalog);
StateVector basis_state(const ModeCatalog& catalog, const OccupationState& occ);
StateVector apply_create(std::size_t mode, const StateVector& s);
StateVector apply_annihilate(std::size_t mode, const StateVector& s);
/// ⟨s1|s2⟩, conjugate-linear in the first argument.
Complex inner(const StateVector& s1, const StateVector& s2);
/// ‖a − b‖.
double distance(const StateVector& a, const StateVector& b);

/// All occupation states with `particles` quanta, in ascending lexicographic
/// order of the occupation tuple.
std::vector<OccupationState> sector_basis(const ModeCatalog& catalog, int particles);
Vector to_dense(const StateVector& s, const std::vector<OccupationState>& basis);
StateVector from_dense(const ModeCatalog& catalog, const std::vector<OccupationState>& basis, const Vector& v);

}  // namespace entwb
