#include "entwb/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

namespace entwb {

namespace {

struct Letter {
  bool dagger;
  int mode;
};

// Sorts idx with the given comparator and returns the permutation parity, or
// nullopt when a fermionic index repeats.
std::optional<int> sort_with_parity(std::vector<int>& idx, bool ascending, Statistics stats) {
  int swaps = 0;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      const bool out_of_order = ascending ? idx[j - 1] > idx[j] : idx[j - 1] < idx[j];
      if (!out_of_order) break;
      std::swap(idx[j - 1], idx[j]);
      ++swaps;
    }
  }
  if (stats == Statistics::Fermi && std::adjacent_find(idx.begin(), idx.end()) != idx.end()) return std::nullopt;
  return stats == Statistics::Fermi && swaps % 2 == 1 ? -1 : 1;
}

// Rewrites a ladder word into normal order, accumulating canonical monomials.
void normal_order(std::vector<Letter> word, Complex coef, Statistics stats,
                  std::vector<std::pair<Monomial, Complex>>& out) {
  for (std::size_t p = 0; p + 1 < word.size(); ++p) {
    if (word[p].dagger || !word[p + 1].dagger) continue;
    const int i = word[p].mode;
    const int j = word[p + 1].mode;
    if (i == j) {
      std::vector<Letter> contracted;
      contracted.reserve(word.size() - 2);
      for (std::size_t q = 0; q < word.size(); ++q) {
        if (q != p && q != p + 1) contracted.push_back(word[q]);
      }
      normal_order(std::move(contracted), coef, stats, out);
    }
    std::swap(word[p], word[p + 1]);
    normal_order(std::move(word), coef * static_cast<double>(exchange_sign(stats)), stats, out);
    return;
  }
  Monomial m;
  for (const auto& l : word) (l.dagger ? m.creators : m.annihilators).push_back(l.mode);
  out.emplace_back(std::move(m), coef);
}

std::vector<Letter> word_of(const Monomial& m) {
  std::vector<Letter> w;
  for (int c : m.creators) w.push_back({true, c});
  for (int a : m.annihilators) w.push_back({false, a});
  return w;
}

std::optional<LadderResult> apply_monomial(const Monomial& m, const OccupationState& occ, Statistics stats) {
  LadderResult cur{occ, 1.0};
  for (auto it = m.annihilators.rbegin(); it != m.annihilators.rend(); ++it) {
    auto r = annihilate_on(cur.state, static_cast<std::size_t>(*it), stats);
    if (!r) return std::nullopt;
    cur = LadderResult{std::move(r->state), cur.factor * r->factor};
  }
  for (auto it = m.creators.rbegin(); it != m.creators.rend(); ++it) {
    auto r = create_on(cur.state, static_cast<std::size_t>(*it), stats);
    if (!r) return std::nullopt;
    cur = LadderResult{std::move(r->state), cur.factor * r->factor};
  }
  return cur;
}

void check_same(const ModeCatalog& a, const ModeCatalog& b) {
  if (!(a == b)) throw Error("catalog mismatch between operators");
}

}  // namespace

OperatorExpr::OperatorExpr(ModeCatalog catalog) : catalog_(std::move(catalog)) {}

OperatorExpr::OperatorExpr(ModeCatalog catalog, const std::vector<std::pair<Monomial, Complex>>& terms)
    : catalog_(std::move(catalog)) {
  for (const auto& [m, c] : terms) add_term(m, c);
}

void OperatorExpr::add_term(Monomial m, Complex c) {
  for (int i : m.creators) {
    if (i < 0 || static_cast<std::size_t>(i) >= catalog_.size()) throw Error("invalid mode index in operator");
  }
  for (int i : m.annihilators) {
    if (i < 0 || static_cast<std::size_t>(i) >= catalog_.size()) throw Error("invalid mode index in operator");
  }
  const auto stats = catalog_.statistics();
  const auto s1 = sort_with_parity(m.creators, true, stats);
  const auto s2 = sort_with_parity(m.annihilators, false, stats);
  if (!s1 || !s2) return;
  auto it = terms_.find(m);
  const Complex total = (it == terms_.end() ? Complex{} : it->second) + static_cast<double>(*s1 * *s2) * c;
  if (std::abs(total) < kDropTolerance) {
    if (it != terms_.end()) terms_.erase(it);
  } else if (it == terms_.end()) {
    terms_.emplace(std::move(m), total);
  } else {
    it->second = total;
  }
}

OperatorExpr OperatorExpr::scalar(const ModeCatalog& catalog, Complex c) {
  return OperatorExpr(catalog, {{Monomial{}, c}});
}

OperatorExpr OperatorExpr::create(const ModeCatalog& catalog, int mode) {
  return OperatorExpr(catalog, {{Monomial{{mode}, {}}, 1.0}});
}

OperatorExpr OperatorExpr::annihilate(const ModeCatalog& catalog, int mode) {
  return OperatorExpr(catalog, {{Monomial{{}, {mode}}, 1.0}});
}

OperatorExpr OperatorExpr::number(const ModeCatalog& catalog, int mode) {
  return OperatorExpr(catalog, {{Monomial{{mode}, {mode}}, 1.0}});
}

std::vector<int> OperatorExpr::modes() const {
  std::set<int> s;
  for (const auto& [m, c] : terms_) {
    s.insert(m.creators.begin(), m.creators.end());
    s.insert(m.annihilators.begin(), m.annihilators.end());
  }
  return {s.begin(), s.end()};
}

OperatorExpr OperatorExpr::adjoint() const {
  OperatorExpr out(catalog_);
  for (const auto& [m, c] : terms_) {
    Monomial a{{m.annihilators.rbegin(), m.annihilators.rend()}, {m.creators.rbegin(), m.creators.rend()}};
    out.add_term(std::move(a), std::conj(c));
  }
  return out;
}

double OperatorExpr::distance(const OperatorExpr& other) const {
  check_same(catalog_, other.catalog_);
  double worst = 0.0;
  for (const auto& [m, c] : (*this - other).terms_) worst = std::max(worst, std::abs(c));
  return worst;
}

bool OperatorExpr::is_hermitian(double tol) const { return distance(adjoint()) <= tol; }

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
  check_same(a.catalog_, b.catalog_);
  OperatorExpr out = a;
  for (const auto& [m, c] : b.terms_) out.add_term(m, c);
  return out;
}

OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) { return a + Complex(-1.0) * b; }

OperatorExpr operator*(Complex c, const OperatorExpr& a) {
  OperatorExpr out(a.catalog_);
  for (const auto& [m, v] : a.terms_) out.add_term(m, c * v);
  return out;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  check_same(a.catalog_, b.catalog_);
  const auto stats = a.catalog_.statistics();
  std::vector<std::pair<Monomial, Complex>> acc;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      auto w = word_of(ma);
      const auto wb = word_of(mb);
      w.insert(w.end(), wb.begin(), wb.end());
      normal_order(std::move(w), ca * cb, stats, acc);
    }
  }
  return OperatorExpr(a.catalog_, acc);
}

std::string OperatorExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    for (int i : m.creators) os << " adag(" << catalog_.label(static_cast<std::size_t>(i)) << ')';
    for (int i : m.annihilators) os << " a(" << catalog_.label(static_cast<std::size_t>(i)) << ')';
  }
  return os.str();
}

OperatorExpr multiply(const OperatorExpr& a, const OperatorExpr& b) { return a * b; }

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b) { return a * b - b * a; }

OperatorExpr lift_single_particle(const Matrix& o, const ModeCatalog& catalog) {
  const auto m = static_cast<Eigen::Index>(catalog.size());
  if (o.rows() != m || o.cols() != m) throw Error("single-particle operator dimension does not match catalog");
  std::vector<std::pair<Monomial, Complex>> terms;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      terms.push_back({Monomial{{static_cast<int>(i)}, {static_cast<int>(j)}}, o(i, j)});
    }
  }
  return OperatorExpr(catalog, terms);
}

StateVector apply(const OperatorExpr& op, const StateVector& s) {
  check_same(op.catalog(), s.catalog());
  const auto stats = s.catalog().statistics();
  StateVector::Terms out;
  for (const auto& [m, c] : op.terms()) {
    for (const auto& [occ, amp] : s.terms()) {
      if (auto r = apply_monomial(m, occ, stats)) out[r->state] += c * r->factor * amp;
    }
  }
  return StateVector(s.catalog(), std::move(out));
}

Complex expectation(const StateVector& s, const OperatorExpr& op) { return inner(s, apply(op, s)); }

namespace {

Matrix charge_block(const OperatorExpr& op, int particles, int charge) {
  const auto& catalog = op.catalog();
  const auto in = sector_basis(catalog, particles);
  const int target = particles + charge;
  if (target < 0) return Matrix::Zero(0, static_cast<Eigen::Index>(in.size()));
  const auto outb = sector_basis(catalog, target);
  std::map<OccupationState, Eigen::Index> row;
  for (std::size_t r = 0; r < outb.size(); ++r) row.emplace(outb[r], static_cast<Eigen::Index>(r));
  Matrix mat = Matrix::Zero(static_cast<Eigen::Index>(outb.size()), static_cast<Eigen::Index>(in.size()));
  for (const auto& [m, c] : op.terms()) {
    if (m.charge() != charge) continue;
    for (std::size_t col = 0; col < in.size(); ++col) {
      if (auto r = apply_monomial(m, in[col], catalog.statistics())) {
        mat(row.at(r->state), static_cast<Eigen::Index>(col)) += c * r->factor;
      }
    }
  }
  return mat;
}

std::set<int> charges(const OperatorExpr& op) {
  std::set<int> out;
  for (const auto& [m, c] : op.terms()) out.insert(m.charge());
  return out;
}

}  // namespace

Matrix sector_matrix(const OperatorExpr& op, int particles) {
  const auto q = charges(op);
  if (q.size() > 1) throw Error("operator does not have a definite particle-number change");
  return charge_block(op, particles, q.empty() ? 0 : *q.begin());
}

double restricted_norm(const OperatorExpr& op, int particles) {
  std::vector<Matrix> blocks;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (int q : charges(op)) {
    blocks.push_back(charge_block(op, particles, q));
    rows += blocks.back().rows();
    cols = blocks.back().cols();
  }
  if (blocks.empty() || rows == 0) return 0.0;
  Matrix stacked(rows, cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    stacked.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return spectral_norm(stacked);
}

double commutator_norm(const OperatorExpr& a, const OperatorExpr& b, int particles) {
  return restricted_norm(commutator(a, b), particles);
}

ParticleLocalPair make_particle_local_pair(Matrix o1, Matrix o2) {
  if (o1.rows() != o1.cols() || o1.rows() != o2.rows() || o2.rows() != o2.cols()) {
    throw Error("particle-local operators must be square with equal dimension");
  }
  if (spectral_norm(o1 * o2 - o2 * o1) > kTolerance) throw Error("particle-local operators do not commute");
  return {std::move(o1), std::move(o2)};
}

ModeBipartition make_mode_bipartition(std::vector<int> left, std::vector<int> right, std::size_t modes) {
  std::vector<int> seen(modes, 0);
  for (const auto* side : {&left, &right}) {
    for (int m : *side) {
      if (m < 0 || static_cast<std::size_t>(m) >= modes) throw Error("mode index out of range in bipartition");
      if (seen[static_cast<std::size_t>(m)]++) throw Error("mode appears twice in bipartition");
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw Error("bipartition does not cover every mode");
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  return {std::move(left), std::move(right)};
}

SectorLocal make_sector_local(Matrix v1, Matrix v2) {
  if (v1.rows() != v2.rows()) throw Error("subspace bases live in different spaces");
  Matrix w(v1.rows(), v1.cols() + v2.cols());
  w << v1, v2;
  if (!has_orthonormal_columns(w)) throw Error("subspaces are not orthonormal and mutually orthogonal");
  return {std::move(v1), std::move(v2)};
}

}  // namespace entwb
