#include "entwb/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace entwb {

std::string_view to_string(Statistics s) { return s == Statistics::Bose ? "bose" : "fermi"; }

ModeCatalog::ModeCatalog(std::vector<std::string> labels, Statistics statistics) {
  if (labels.empty()) throw Error("mode catalog must contain at least one mode");
  if (labels.size() > kMaxModes) {
    throw Error("mode catalog exceeds " + std::to_string(kMaxModes) + " modes");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw Error("empty mode label");
    if (!seen.insert(l).second) throw Error("duplicate mode label '" + l + "'");
  }
  data_ = std::make_shared<const Data>(Data{std::move(labels), statistics});
}

const std::string& ModeCatalog::label(std::size_t mode) const {
  if (mode >= size()) throw Error("mode index " + std::to_string(mode) + " out of range");
  return data_->labels[mode];
}

std::optional<std::size_t> ModeCatalog::find(std::string_view label) const {
  const auto& ls = data_->labels;
  const auto it = std::find(ls.begin(), ls.end(), label);
  if (it == ls.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ls.begin());
}

std::size_t ModeCatalog::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw Error("unknown mode label '" + std::string(label) + "'");
}

bool operator==(const ModeCatalog& a, const ModeCatalog& b) {
  if (a.data_ == b.data_) return true;
  return a.data_->statistics == b.data_->statistics && a.data_->labels == b.data_->labels;
}

int OccupationState::total() const {
  int n = 0;
  for (auto v : occ_) n += v;
  return n;
}

OccupationState OccupationState::with(std::size_t mode, int n) const {
  auto occ = occ_;
  occ.at(mode) = static_cast<std::uint8_t>(n);
  return OccupationState(std::move(occ));
}

std::string OccupationState::to_string() const {
  std::ostringstream os;
  os << '|';
  for (std::size_t i = 0; i < occ_.size(); ++i) {
    if (i) os << ',';
    os << static_cast<int>(occ_[i]);
  }
  os << '>';
  return os.str();
}

namespace {

int jordan_wigner_sign(const OccupationState& occ, std::size_t mode) {
  int parity = 0;
  for (std::size_t i = 0; i < mode; ++i) parity += occ[i];
  return (parity % 2 == 0) ? 1 : -1;
}

void check_mode(const ModeCatalog& catalog, std::size_t mode) {
  if (mode >= catalog.size()) throw Error("invalid mode index " + std::to_string(mode));
}

}  // namespace

std::optional<LadderResult> create_on(const OccupationState& occ, std::size_t mode, Statistics stats) {
  const int n = occ[mode];
  if (stats == Statistics::Fermi) {
    if (n == 1) return std::nullopt;
    return LadderResult{occ.with(mode, 1), static_cast<double>(jordan_wigner_sign(occ, mode))};
  }
  if (n >= 255) throw Error("bosonic occupation overflow");
  return LadderResult{occ.with(mode, n + 1), std::sqrt(static_cast<double>(n + 1))};
}

std::optional<LadderResult> annihilate_on(const OccupationState& occ, std::size_t mode, Statistics stats) {
  const int n = occ[mode];
  if (n == 0) return std::nullopt;
  if (stats == Statistics::Fermi) {
    return LadderResult{occ.with(mode, 0), static_cast<double>(jordan_wigner_sign(occ, mode))};
  }
  return LadderResult{occ.with(mode, n - 1), std::sqrt(static_cast<double>(n))};
}

StateVector::StateVector(ModeCatalog catalog, Terms terms) : catalog_(std::move(catalog)) {
  for (auto& [occ, amp] : terms) {
    if (occ.size() != catalog_.size()) throw Error("occupation state does not match catalog size");
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag())) throw Error("non-finite amplitude");
    if (catalog_.statistics() == Statistics::Fermi) {
      for (auto v : occ.values()) {
        if (v > 1) throw Error("fermionic occupation above 1 in " + occ.to_string());
      }
    }
    if (std::abs(amp) >= kDropTolerance) terms_.emplace(occ, amp);
  }
}

Complex StateVector::amplitude(const OccupationState& occ) const {
  const auto it = terms_.find(occ);
  return it == terms_.end() ? Complex{} : it->second;
}

double StateVector::norm() const {
  double sq = 0.0;
  for (const auto& [occ, amp] : terms_) sq += std::norm(amp);
  return std::sqrt(sq);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n < kTolerance) throw Error("cannot normalize the zero state");
  return Complex(1.0 / n) * *this;
}

std::set<int> StateVector::particle_numbers() const {
  std::set<int> out;
  for (const auto& [occ, amp] : terms_) out.insert(occ.total());
  return out;
}

std::optional<int> StateVector::particle_number() const {
  const auto ns = particle_numbers();
  if (ns.size() != 1) return std::nullopt;
  return *ns.begin();
}

StateVector StateVector::project_sector(int particles) const {
  Terms out;
  for (const auto& [occ, amp] : terms_) {
    if (occ.total() == particles) out.emplace(occ, amp);
  }
  return StateVector(catalog_, std::move(out));
}

StateVector operator+(const StateVector& a, const StateVector& b) {
  if (!(a.catalog_ == b.catalog_)) throw Error("catalog mismatch in state addition");
  auto terms = a.terms_;
  for (const auto& [occ, amp] : b.terms_) terms[occ] += amp;
  return StateVector(a.catalog_, std::move(terms));
}

StateVector operator-(const StateVector& a, const StateVector& b) { return a + Complex(-1.0) * b; }

StateVector operator*(Complex c, const StateVector& s) {
  auto terms = s.terms_;
  for (auto& [occ, amp] : terms) amp *= c;
  return StateVector(s.catalog_, std::move(terms));
}

std::string StateVector::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [occ, amp] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << '(' << amp.real() << (amp.imag() < 0 ? "-" : "+") << std::abs(amp.imag()) << "i)" << occ.to_string();
  }
  return os.str();
}

StateVector vacuum(const ModeCatalog& catalog) {
  return StateVector(catalog, {{OccupationState::empty(catalog.size()), Complex(1.0)}});
}

StateVector basis_state(const ModeCatalog& catalog, const OccupationState& occ) {
  return StateVector(catalog, {{occ, Complex(1.0)}});
}

namespace {

template <class Ladder>
StateVector apply_ladder(std::size_t mode, const StateVector& s, Ladder ladder) {
  check_mode(s.catalog(), mode);
  StateVector::Terms out;
  for (const auto& [occ, amp] : s.terms()) {
    if (auto r = ladder(occ, mode, s.catalog().statistics())) out[r->state] += r->factor * amp;
  }
  return StateVector(s.catalog(), std::move(out));
}

}  // namespace

StateVector apply_create(std::size_t mode, const StateVector& s) { return apply_ladder(mode, s, create_on); }

StateVector apply_annihilate(std::size_t mode, const StateVector& s) { return apply_ladder(mode, s, annihilate_on); }

Complex inner(const StateVector& s1, const StateVector& s2) {
  if (!(s1.catalog() == s2.catalog())) throw Error("catalog mismatch in inner product");
  Complex out{};
  const auto& small = s1.terms().size() <= s2.terms().size() ? s1.terms() : s2.terms();
  const bool small_is_first = &small == &s1.terms();
  for (const auto& [occ, amp] : small) {
    const Complex other = small_is_first ? s2.amplitude(occ) : s1.amplitude(occ);
    out += small_is_first ? std::conj(amp) * other : std::conj(other) * amp;
  }
  return out;
}

double distance(const StateVector& a, const StateVector& b) { return (a - b).norm(); }

namespace {

void enumerate(std::size_t mode, int remaining, int cap, std::vector<std::uint8_t>& occ,
               std::vector<OccupationState>& out) {
  if (mode + 1 == occ.size()) {
    if (remaining > cap) return;
    occ[mode] = static_cast<std::uint8_t>(remaining);
    out.emplace_back(occ);
    return;
  }
  for (int n = 0; n <= std::min(remaining, cap); ++n) {
    occ[mode] = static_cast<std::uint8_t>(n);
    enumerate(mode + 1, remaining - n, cap, occ, out);
  }
}

}  // namespace

std::vector<OccupationState> sector_basis(const ModeCatalog& catalog, int particles) {
  if (particles < 0 || particles > kMaxParticles) {
    throw Error("particle number " + std::to_string(particles) + " outside supported range 0.." +
                std::to_string(kMaxParticles));
  }
  const int cap = catalog.statistics() == Statistics::Fermi ? 1 : particles;
  std::vector<std::uint8_t> occ(catalog.size(), 0);
  std::vector<OccupationState> out;
  enumerate(0, particles, cap, occ, out);
  std::sort(out.begin(), out.end());
  return out;
}

Vector to_dense(const StateVector& s, const std::vector<OccupationState>& basis) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) v(static_cast<Eigen::Index>(i)) = s.amplitude(basis[i]);
  return v;
}

StateVector from_dense(const ModeCatalog& catalog, const std::vector<OccupationState>& basis, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != basis.size()) throw Error("dense vector does not match basis size");
  StateVector::Terms terms;
  for (std::size_t i = 0; i < basis.size(); ++i) terms.emplace(basis[i], v(static_cast<Eigen::Index>(i)));
  return StateVector(catalog, std::move(terms));
}

}  // namespace entwb
