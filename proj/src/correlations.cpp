#include "entwb/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace entwb {

namespace {

FactorizationReport make_report(Complex lhs, Complex rhs, bool commute, double tol) {
  const Complex gap = lhs - rhs;
  return FactorizationReport{lhs, rhs, gap, std::abs(gap) < tol, commute, tol};
}

}  // namespace

FactorizationReport factorization_gap(const StateVector& s, const OperatorExpr& a, const OperatorExpr& b, double tol) {
  if (!(s.catalog() == a.catalog()) || !(s.catalog() == b.catalog())) throw Error("catalog mismatch in correlation probe");
  const OperatorExpr c = commutator(a, b);
  bool commute = true;
  for (int n : s.particle_numbers()) {
    if (restricted_norm(c, n) > tol) commute = false;
  }
  const StateVector bs = apply(b, s);
  const Complex lhs = inner(s, apply(a, bs));
  const Complex rhs = expectation(s, a) * inner(s, bs);
  return make_report(lhs, rhs, commute, tol);
}

FactorizationReport factorization_gap(const FirstQTensor& t, const Matrix& a, const Matrix& b, double tol) {
  // Frobenius norm bounds the operator norm from above.
  const bool commute = (a * b - b * a).norm() <= tol;
  const Vector bt = b * t.amps();
  const Complex lhs = t.amps().dot(a * bt);
  const Complex rhs = expectation(t, a) * t.amps().dot(bt);
  return make_report(lhs, rhs, commute, tol);
}

void validate(const ExplicitDecomposition& d) {
  if (d.mixture.empty() || d.terms.empty()) throw Error("decomposition needs a mixture and at least one product term");
  double q = 0.0;
  for (const auto& m : d.mixture) {
    if (m.weight < 0.0) throw Error("negative mixture weight");
    if (std::abs(m.state.norm() - 1.0) > kTolerance) throw Error("mixture state is not normalized");
    q += m.weight;
  }
  double p = 0.0;
  for (const auto& t : d.terms) {
    if (t.weight < 0.0) throw Error("negative product-term weight");
    if (std::abs(t.first.norm() - 1.0) > kTolerance || std::abs(t.second.norm() - 1.0) > kTolerance) {
      throw Error("local state is not normalized");
    }
    if (!(t.first.catalog() == t.second.catalog())) throw Error("catalog mismatch in product term");
    p += t.weight;
  }
  if (std::abs(q - 1.0) > kTolerance || std::abs(p - 1.0) > kTolerance) throw Error("weights do not sum to one");
}

FactorizationReport check_sep2(const ExplicitDecomposition& d, const OperatorExpr& a, const OperatorExpr& b,
                               double tol) {
  validate(d);
  Complex lhs{};
  bool commute = true;
  const OperatorExpr ab = a * b;
  const OperatorExpr c = commutator(a, b);
  for (const auto& m : d.mixture) {
    lhs += m.weight * expectation(m.state, ab);
    for (int n : m.state.particle_numbers()) {
      if (restricted_norm(c, n) > tol) commute = false;
    }
  }
  Complex rhs{};
  for (const auto& t : d.terms) rhs += t.weight * expectation(t.first, a) * expectation(t.second, b);
  return make_report(lhs, rhs, commute, tol);
}

std::string csv_header() { return "state,a,b,lhs_re,lhs_im,rhs_re,rhs_im,gap_re,gap_im,factorizes,probes_commute"; }

std::string to_csv(const CorrelationRecord& r) {
  char buf[256];
  const auto& f = r.report;
  std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s,%s", f.lhs.real(), f.lhs.imag(),
                f.rhs.real(), f.rhs.imag(), f.gap.real(), f.gap.imag(), f.factorizes ? "true" : "false",
                f.probes_commute ? "true" : "false");
  return r.state_id + "," + r.a_id + "," + r.b_id + "," + buf;
}

OperatorExpr random_mode_local_probe(const ModeCatalog& catalog, const std::vector<int>& modes, Rng& rng) {
  if (modes.empty()) return OperatorExpr::scalar(catalog, random_complex(rng).real());
  std::vector<std::pair<Monomial, Complex>> terms;
  terms.push_back({Monomial{}, random_complex(rng)});
  for (int i : modes) terms.push_back({Monomial{{}, {i}}, random_complex(rng)});
  for (int i : modes) {
    for (int j : modes) {
      terms.push_back({Monomial{{i}, {j}}, random_complex(rng)});
      terms.push_back({Monomial{{}, {i, j}}, random_complex(rng)});
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  for (int k = 0; k < 3; ++k) {
    const Monomial m{{modes[pick(rng)], modes[pick(rng)]}, {modes[pick(rng)], modes[pick(rng)]}};
    terms.push_back({m, random_complex(rng)});
  }
  const OperatorExpr x(catalog, terms);
  return Complex(0.5) * (x + x.adjoint());
}

ProbeSweepResult probe_sweep(const StateVector& s, const ModeBipartition& bip, const ProbeSweepConfig& config) {
  Rng rng(config.seed);
  ProbeSweepResult out{config, 0.0, {}};
  for (int k = 0; k < config.samples; ++k) {
    const auto a = random_mode_local_probe(s.catalog(), bip.left, rng);
    const auto b = random_mode_local_probe(s.catalog(), bip.right, rng);
    auto r = factorization_gap(s, a, b);
    out.max_gap = std::max(out.max_gap, std::abs(r.gap));
    out.reports.push_back(r);
  }
  return out;
}

StateVector random_sector_state(const ModeCatalog& catalog, int particles, Rng& rng) {
  const auto basis = sector_basis(catalog, particles);
  return from_dense(catalog, basis, random_vector(static_cast<Eigen::Index>(basis.size()), rng));
}

namespace {

OperatorExpr random_creation_polynomial(const ModeCatalog& catalog, const std::vector<int>& modes, int particles,
                                        Rng& rng) {
  std::vector<std::pair<Monomial, Complex>> terms;
  for (const auto& occ : sector_basis(catalog, particles)) {
    Monomial m;
    bool inside = true;
    for (std::size_t i = 0; i < occ.size() && inside; ++i) {
      if (occ[i] == 0) continue;
      if (std::find(modes.begin(), modes.end(), static_cast<int>(i)) == modes.end()) inside = false;
      for (int k = 0; k < occ[i]; ++k) m.creators.push_back(static_cast<int>(i));
    }
    if (inside) terms.push_back({m, random_complex(rng)});
  }
  if (terms.empty()) throw Error("side has too few modes for the requested particle number");
  return OperatorExpr(catalog, terms);
}

}  // namespace

StateVector random_product_state(const ModeCatalog& catalog, const ModeBipartition& bip, int left_particles,
                                 int right_particles, Rng& rng) {
  const auto p = random_creation_polynomial(catalog, bip.left, left_particles, rng);
  const auto q = random_creation_polynomial(catalog, bip.right, right_particles, rng);
  return apply(p, apply(q, vacuum(catalog))).normalized();
}

std::optional<FirstQTensor> separable_I_counterexample(const ParticleLocalPair& pair) {
  // A generic real combination separates the joint eigenvalues.
  const Matrix mix = pair.o1 + 0.6180339887498949 * pair.o2;
  Eigen::ComplexEigenSolver<Matrix> eig(mix);
  const Matrix vecs = eig.eigenvectors();
  const auto d = vecs.cols();
  std::vector<Vector> e;
  std::vector<Complex> o1;
  std::vector<Complex> o2;
  for (Eigen::Index k = 0; k < d; ++k) {
    const Vector v = vecs.col(k).normalized();
    e.push_back(v);
    o1.push_back(v.dot(pair.o1 * v));
    o2.push_back(v.dot(pair.o2 * v));
  }
  double best = 0.0;
  std::pair<std::size_t, std::size_t> arg{0, 0};
  for (std::size_t l = 0; l < e.size(); ++l) {
    for (std::size_t k = l + 1; k < e.size(); ++k) {
      const double w = std::abs((o1[l] - o1[k]) * (o2[l] - o2[k]));
      if (w > best) {
        best = w;
        arg = {l, k};
      }
    }
  }
  if (best < kTolerance) return std::nullopt;
  const Vector psi = (e[arg.first] + e[arg.second]) / std::sqrt(2.0);
  return FirstQTensor::product({psi, psi});
}

}  // namespace entwb
