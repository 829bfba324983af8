#include "entwb/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace entwb {

namespace {

void require_normalized(double norm) {
  if (std::abs(norm - 1.0) > kTolerance) throw Error("classifier input must be a normalized pure state");
}

ModeCatalog index_catalog(int dim, Statistics stats) {
  std::vector<std::string> labels;
  for (int i = 0; i < dim; ++i) labels.push_back(std::to_string(i));
  return ModeCatalog(std::move(labels), stats);
}

void require_symmetry(const FirstQTensor& t, Statistics stats) {
  if (!t.has_symmetry(tag_for(stats))) {
    throw Error(stats == Statistics::Bose ? "bosonic state must be symmetric" : "fermionic state must be antisymmetric");
  }
}

std::vector<double> normalized_singular_values(const Matrix& m) {
  auto sv = singular_values(m);
  for (auto& v : sv) {
    if (v < kDropTolerance) v = 0.0;
  }
  return sv;
}

// |⟨⊗_j w_{o_j}|t⟩| · √(N!/Π m!) for the orbital list in slot order.
double fock_overlap(const FirstQTensor& t, const std::vector<Vector>& orbitals, const std::vector<int>& occupations) {
  std::vector<Vector> factors;
  double denom = 1.0;
  for (std::size_t o = 0; o < orbitals.size(); ++o) {
    for (int k = 0; k < occupations[o]; ++k) factors.push_back(orbitals[o]);
    denom *= static_cast<double>(factorial(occupations[o]));
  }
  const FirstQTensor bra = FirstQTensor::product(factors);
  return std::abs(bra.amps().dot(t.amps())) * std::sqrt(static_cast<double>(factorial(t.particles())) / denom);
}

// Orbital search for N-particle permanent/Slater states. The one-body density
// of √c·𝔖[ψ_1^{⊗m_1}⊗...] is Σ m_k |ψ_k⟩⟨ψ_k| / N, so the orbitals are its
// eigenvectors up to rotations inside degenerate occupation blocks.
Verdict search_separable_II(const FirstQTensor& t, Statistics stats, const SeparableIIOptions& options) {
  const int n = t.particles();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(one_body_density(t));
  struct Group {
    int occupation;
    Matrix vectors;
  };
  std::map<int, std::vector<Eigen::Index>> by_occ;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double occ = n * eig.eigenvalues()(k);
    const double rounded = std::round(occ);
    if (std::abs(occ - rounded) > 1e-6) return Verdict{Definition::II, false, kTolerance, SearchWitness{0.0, {}}};
    if (rounded > 0.5) by_occ[static_cast<int>(rounded)].push_back(k);
  }
  std::vector<Group> groups;
  for (const auto& [m, idx] : by_occ) {
    if (stats == Statistics::Fermi && m > 1) return Verdict{Definition::II, false, kTolerance, SearchWitness{0.0, {}}};
    Matrix v(t.dim(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(idx[c]);
    groups.push_back({m, v});
  }

  auto evaluate = [&](const std::vector<Matrix>& rotations, std::vector<int>* pattern) {
    std::vector<Vector> orbitals;
    std::vector<int> occ;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const Matrix w = groups[g].vectors * rotations[g];
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        orbitals.push_back(w.col(c));
        occ.push_back(groups[g].occupation);
      }
    }
    if (pattern) *pattern = occ;
    return fock_overlap(t, orbitals, occ);
  };

  std::vector<Matrix> identity;
  bool needs_search = false;
  for (const auto& g : groups) {
    identity.push_back(Matrix::Identity(g.vectors.cols(), g.vectors.cols()));
    // Slater determinants and singly degenerate orbitals are basis independent.
    if (stats == Statistics::Bose && g.vectors.cols() > 1) needs_search = true;
  }
  std::vector<int> pattern;
  double best = evaluate(identity, &pattern);
  if (needs_search) {
    Rng rng(options.seed);
    for (int r = 0; r < options.restarts && best < 1.0 - kTolerance; ++r) {
      std::vector<Matrix> rot;
      for (const auto& g : groups) rot.push_back(random_unitary(g.vectors.cols(), rng));
      double value = evaluate(rot, nullptr);
      for (double step = 0.5; step > 1e-7; step *= 0.7) {
        for (int k = 0; k < 20; ++k) {
          auto trial = rot;
          for (auto& u : trial) {
            Eigen::SelfAdjointEigenSolver<Matrix> h(random_hermitian(u.cols(), rng));
            const Vector phases = (Complex(0.0, step) * h.eigenvalues().cast<Complex>()).array().exp();
            u = u * h.eigenvectors() * phases.asDiagonal() * h.eigenvectors().adjoint();
          }
          const double v = evaluate(trial, nullptr);
          if (v > value) {
            value = v;
            rot = std::move(trial);
          }
        }
      }
      best = std::max(best, value);
    }
  }
  const bool separable = best * best >= 1.0 - kTolerance;
  return Verdict{Definition::II, separable, kTolerance, SearchWitness{best, pattern}};
}

}  // namespace

std::string_view to_string(Definition d) {
  switch (d) {
    case Definition::I: return "I";
    case Definition::II: return "II";
    case Definition::III: return "III";
    case Definition::IV: return "IV";
    case Definition::V: return "V";
  }
  return "?";
}

Definition parse_definition(std::string_view text) {
  for (auto d : {Definition::I, Definition::II, Definition::III, Definition::IV, Definition::V}) {
    if (text == to_string(d)) return d;
  }
  throw Error("unknown definition '" + std::string(text) + "' (expected I, II, III, IV or V)");
}

std::string Verdict::summary() const {
  std::string out = std::string(to_string(definition)) + (separable ? " separable" : " entangled");
  auto list = [](const std::vector<double>& v) {
    std::string s = "[";
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.6f", i ? " " : "", v[i]);
      s += buf;
    }
    return s + "]";
  };
  char buf[64];
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, PurityWitness>) {
          std::snprintf(buf, sizeof buf, " purity=%.6f", w.purity);
          out += buf;
        } else if constexpr (std::is_same_v<W, SpectrumWitness> || std::is_same_v<W, SchmidtWitness>) {
          out += " spectrum=" + list(w.values);
        } else if constexpr (std::is_same_v<W, SectorWitness>) {
          for (const auto& e : w.sectors) {
            std::snprintf(buf, sizeof buf, " (%d,%d):p=%.6f,rank=%zu", e.n1, e.n2, e.weight, e.rank);
            out += buf;
          }
        } else if constexpr (std::is_same_v<W, EntropyWitness>) {
          std::snprintf(buf, sizeof buf, " S=%.6f", w.entropy);
          out += buf;
        } else {
          std::snprintf(buf, sizeof buf, " overlap=%.6f", w.overlap);
          out += buf;
        }
      },
      witness);
  return out;
}

Verdict is_separable_I(const FirstQTensor& t, Statistics stats) {
  if (t.particles() < 2) throw Error("separable-I needs at least two particles");
  require_normalized(t.norm());
  require_symmetry(t, stats);
  const Matrix rho = one_body_density(t);
  const double purity = (rho * rho).trace().real();
  const bool separable = stats == Statistics::Bose && purity >= 1.0 - kTolerance;
  return Verdict{Definition::I, separable, kTolerance, PurityWitness{purity}};
}

Verdict is_separable_I(const StateVector& s) { return is_separable_I(from_fock(s), s.catalog().statistics()); }

Verdict is_separable_II(const FirstQTensor& t, Statistics stats, const SeparableIIOptions& options) {
  require_normalized(t.norm());
  require_symmetry(t, stats);
  if (t.particles() != 2) {
    if (options.brute_force && t.particles() > 2) return search_separable_II(t, stats, options);
    throw Error("unsupported: separable-II is decided for N = 2 only (enable the brute-force search for N > 2)");
  }
  const int d = t.dim();
  Matrix c(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) c(i, j) = t.amps()(i * d + j);
  }
  const auto sv = normalized_singular_values(c);
  bool separable = false;
  if (stats == Statistics::Fermi) {
    separable = numerical_rank(sv) == 2;
  } else {
    // Rank two with equal Takagi values is exactly √2·𝔖[ψ1⊗ψ2] with ψ1 ⟂ ψ2.
    const auto rank = numerical_rank(sv);
    separable = rank == 1 || (rank == 2 && std::abs(sv[0] - sv[1]) < kTolerance);
  }
  return Verdict{Definition::II, separable, kTolerance, SpectrumWitness{sv}};
}

Verdict is_separable_II(const StateVector& s, const SeparableIIOptions& options) {
  return is_separable_II(from_fock(s), s.catalog().statistics(), options);
}

Verdict is_separable_III(const FirstQTensor& t, const SectorLocal& split) {
  require_normalized(t.norm());
  SectorWitness w;
  bool separable = true;
  for (const auto& b : split_by_subspaces(t, split.v1, split.v2)) {
    auto sv = normalized_singular_values(b.block);
    const auto rank = numerical_rank(sv);
    if (rank != 1) separable = false;
    w.sectors.push_back(SectorEntry{b.n1, b.n2, b.weight, rank, std::move(sv)});
  }
  return Verdict{Definition::III, separable, kTolerance, std::move(w)};
}

Verdict is_separable_III(const StateVector& s, const SectorLocal& split) {
  return is_separable_III(from_fock(s), split);
}

ReducedX1 reduced_X1(const StateVector& s, const Matrix& kbasis) {
  require_normalized(s.norm());
  if (s.particle_number() != 2) throw Error("reduced X1 is defined for two-particle states");
  const auto d = static_cast<Eigen::Index>(s.catalog().size());
  if (kbasis.rows() != d || kbasis.cols() == 0) throw Error("K basis dimension mismatch");
  if (!has_orthonormal_columns(kbasis)) throw Error("K basis is not orthonormal");

  std::vector<StateVector> lowered;
  for (Eigen::Index i = 0; i < d; ++i) lowered.push_back(apply_annihilate(static_cast<std::size_t>(i), s));
  Matrix x = Matrix::Zero(d, d);
  double denom = 0.0;
  for (Eigen::Index k = 0; k < kbasis.cols(); ++k) {
    // a_ψ = Σ_i ψ_i* a_i, expanded on the one-particle basis.
    Vector v = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Complex c = std::conj(kbasis(i, k));
      if (c == Complex{}) continue;
      for (const auto& [occ, amp] : lowered[static_cast<std::size_t>(i)].terms()) {
        const auto& vals = occ.values();
        const auto mode = std::find(vals.begin(), vals.end(), 1) - vals.begin();
        v(mode) += c * amp;
      }
    }
    x += v * v.adjoint();
    denom += v.squaredNorm();
  }
  if (denom < kTolerance) throw Error("state has no support meeting the subspace K");
  x /= denom;
  return ReducedX1{x, von_neumann_entropy(x)};
}

ReducedX1 reduced_X1(const FirstQTensor& t, Statistics stats, const Matrix& kbasis) {
  require_normalized(t.norm());
  return reduced_X1(to_fock(t, index_catalog(t.dim(), stats)), kbasis);
}

namespace {

Verdict verdict_IV(const ReducedX1& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(x.matrix);
  std::vector<double> ev(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  std::reverse(ev.begin(), ev.end());
  for (auto& v : ev) {
    if (std::abs(v) < kDropTolerance) v = 0.0;
  }
  return Verdict{Definition::IV, x.entropy <= kEntropyTolerance, kEntropyTolerance, EntropyWitness{x.entropy, ev}};
}

}  // namespace

Verdict is_entangled_IV(const FirstQTensor& t, Statistics stats, const Matrix& kbasis) {
  return verdict_IV(reduced_X1(t, stats, kbasis));
}

Verdict is_entangled_IV(const StateVector& s, const Matrix& kbasis) { return verdict_IV(reduced_X1(s, kbasis)); }

Verdict is_separable_V(const StateVector& s, const ModeBipartition& bip) {
  require_normalized(s.norm());
  const auto& catalog = s.catalog();
  const auto checked = make_mode_bipartition(bip.left, bip.right, catalog.size());
  const bool fermi = catalog.statistics() == Statistics::Fermi;

  std::map<std::vector<int>, Eigen::Index> rows;
  std::map<std::vector<int>, Eigen::Index> cols;
  struct Entry {
    Eigen::Index r;
    Eigen::Index c;
    Complex amp;
  };
  std::vector<Entry> entries;
  for (const auto& [occ, amp] : s.terms()) {
    std::vector<int> left;
    std::vector<int> right;
    for (int m : checked.left) left.push_back(occ[static_cast<std::size_t>(m)]);
    for (int m : checked.right) right.push_back(occ[static_cast<std::size_t>(m)]);
    // Moving every left creator ahead of the right creators preceding it.
    int swaps = 0;
    if (fermi) {
      for (int l : checked.left) {
        if (occ[static_cast<std::size_t>(l)] == 0) continue;
        for (int r : checked.right) {
          if (r < l && occ[static_cast<std::size_t>(r)] == 1) ++swaps;
        }
      }
    }
    const auto ri = rows.emplace(left, static_cast<Eigen::Index>(rows.size())).first->second;
    const auto ci = cols.emplace(right, static_cast<Eigen::Index>(cols.size())).first->second;
    entries.push_back({ri, ci, swaps % 2 == 1 ? -amp : amp});
  }
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (const auto& e : entries) m(e.r, e.c) += e.amp;
  auto sv = normalized_singular_values(m);
  const bool separable = numerical_rank(sv) == 1;
  return Verdict{Definition::V, separable, kTolerance, SchmidtWitness{std::move(sv)}};
}

double qfi_phase(const StateVector& s, const OperatorExpr& g) {
  require_normalized(s.norm());
  if (!g.is_hermitian()) throw Error("generator must be Hermitian");
  const StateVector gs = apply(g, s);
  const double mean = inner(s, gs).real();
  return 4.0 * (gs.norm() * gs.norm() - mean * mean);
}

double qfi_phase(const FirstQTensor& t, const Matrix& g) {
  require_normalized(t.norm());
  if ((g - g.adjoint()).cwiseAbs().maxCoeff() > kTolerance) throw Error("generator must be Hermitian");
  const Vector gt = g * t.amps();
  const double mean = t.amps().dot(gt).real();
  return 4.0 * (gt.squaredNorm() - mean * mean);
}

}  // namespace entwb
