#include "entwb/repro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>

#include "entwb/correlations.hpp"
#include "entwb/scenario.hpp"

namespace entwb {

bool Check::pass() const {
  if (!std::isfinite(value)) return false;
  if (relation == Relation::Greater) return value > expected + tolerance;
  return std::abs(value - expected) <= tolerance;
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::Locality:
      return "locality";
    case Criterion::EffectiveDistinguishability:
      return "effdist";
    case Criterion::Resources:
      return "resources";
  }
  return "?";
}

bool ScenarioResult::passed() const {
  return error.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

bool ReproReport::passed() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const ScenarioResult& s) { return s.passed(); });
}

const ScenarioResult* ReproReport::find(const std::string& id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

namespace {

constexpr double kLog2 = std::numbers::ln2;

Check eq(std::string q, double value, double expected, double tol = kTolerance) {
  return Check{std::move(q), value, expected, tol};
}
Check flag(std::string q, bool value, bool expected) {
  return Check{std::move(q), value ? 1.0 : 0.0, expected ? 1.0 : 0.0, 0.0, Check::Relation::Equal, 0};
}
Check greater(std::string q, double value, double bound) {
  return Check{std::move(q), value, bound, 0.0, Check::Relation::Greater};
}
Check entropy(std::string q, double value, double expected) {
  return Check{std::move(q), value, expected, kEntropyTolerance, Check::Relation::Equal, 6};
}

std::string tag(Statistics s) { return std::string(to_string(s)); }

Vector unit(int d, int i) {
  Vector v = Vector::Zero(d);
  v(i) = 1.0;
  return v;
}

Matrix proj(const Vector& v) { return v * v.adjoint(); }

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

// Single-particle layout shared by the L/R examples: flat = ext·2 + spin.
enum : int { kLUp = 0, kLDn = 1, kRUp = 2, kRDn = 3 };

ModeCatalog lr_catalog(Statistics s) { return ModeCatalog({"L,up", "L,dn", "R,up", "R,dn"}, s); }
ModeCatalog two_mode_catalog(Statistics s) { return ModeCatalog({"0", "1"}, s); }

Vector lr(int ext, const Vector& spin) { return kron(unit(2, ext), spin); }

/// Normalized (anti)symmetrization of a ⊗ b.
FirstQTensor sym_pair(const Vector& a, const Vector& b, Statistics s) {
  return symmetrize(FirstQTensor::product({a, b}), s).normalized();
}

FirstQTensor phi1(Statistics s) { return sym_pair(unit(4, kLUp), unit(4, kRDn), s); }

FirstQTensor phi2(Statistics s) {
  const auto a = symmetrize(FirstQTensor::product({unit(4, kLUp), unit(4, kRDn)}), s);
  const auto b = symmetrize(FirstQTensor::product({unit(4, kLDn), unit(4, kRUp)}), s);
  const auto t = (a + b).normalized();
  return FirstQTensor(t.dim(), t.particles(), t.amps(), tag_for(s));
}

/// Separability of the image of a one-left, one-right state under the
/// effective-distinguishability map.
bool dist_separable(const FirstQTensor& t) {
  const auto u = effective_distinguish(t, {unit(2, 0), unit(2, 1)}, 2);
  Matrix c(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) c(i, j) = u.amps()(i * 2 + j);
  }
  return numerical_rank(singular_values(c)) == 1;
}

Matrix left_k() {
  Matrix k = Matrix::Zero(4, 2);
  k(kLUp, 0) = 1.0;
  k(kLDn, 1) = 1.0;
  return k;
}
Matrix right_k() {
  Matrix k = Matrix::Zero(4, 2);
  k(kRUp, 0) = 1.0;
  k(kRDn, 1) = 1.0;
  return k;
}
SectorLocal lr_split() { return make_sector_local(left_k(), right_k()); }
ModeBipartition lr_bipartition() { return make_mode_bipartition({kLUp, kLDn}, {kRUp, kRDn}, 4); }

OperatorExpr creation(const ModeCatalog& c, const Vector& v) {
  OperatorExpr out(c);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != Complex{}) out = out + v(i) * OperatorExpr::create(c, static_cast<int>(i));
  }
  return out;
}

StateVector create_pair(const ModeCatalog& c, int i, int j) {
  return apply(OperatorExpr::create(c, i) * OperatorExpr::create(c, j), vacuum(c));
}

/// Part of s with exactly n quanta in `modes`.
StateVector project_count(const StateVector& s, const std::vector<int>& modes, int n) {
  StateVector::Terms kept;
  for (const auto& [occ, amp] : s.terms()) {
    int k = 0;
    for (int m : modes) k += occ[static_cast<std::size_t>(m)];
    if (k == n) kept.emplace(occ, amp);
  }
  return StateVector(s.catalog(), kept);
}

Matrix embed(const Matrix& block, int ext) { return kron(proj(unit(2, ext)), block); }

/// exp(−iθG) on the `particles` sector.
StateVector evolve(const StateVector& s, const OperatorExpr& g, double theta, int particles) {
  const auto basis = sector_basis(s.catalog(), particles);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sector_matrix(g, particles));
  Vector phases(eig.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(Complex(0.0, -theta * eig.eigenvalues()(i)));
  const Matrix u = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  return from_dense(s.catalog(), basis, u * to_dense(s, basis));
}

using Runner = std::function<void(ScenarioResult&, Rng&)>;

// ---------------------------------------------------------------------------

void bell_probe(ScenarioResult& r, Rng&) {
  const Vector up = unit(2, 0);
  const Vector dn = unit(2, 1);
  const Vector psi = (kron(up, up) + kron(dn, dn)) / std::sqrt(2.0);
  const FirstQTensor t(2, 2, psi);
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix p1 = kron(proj(up), id);
  const auto rep = factorization_gap(t, p1, kron(id, proj(up)));
  r.checks.push_back(eq("lhs", rep.lhs.real(), 0.5));
  r.checks.push_back(eq("rhs", rep.rhs.real(), 0.25));
  r.checks.push_back(eq("gap", rep.gap.real(), 0.25));
  r.checks.push_back(flag("factorizes", rep.factorizes, false));
  // P2 projecting on the second spin down gives the opposite sign.
  const auto literal = factorization_gap(t, p1, kron(id, proj(dn)));
  r.checks.push_back(eq("gap_p2_down", literal.gap.real(), -0.25));
}

void bell_global(ScenarioResult& r, Rng& rng) {
  const Vector up = unit(2, 0);
  const Vector dn = unit(2, 1);
  const Vector plus = (kron(up, up) + kron(dn, dn)) / std::sqrt(2.0);
  const Vector minus = (kron(up, up) - kron(dn, dn)) / std::sqrt(2.0);
  const FirstQTensor t(2, 2, plus);
  const Matrix id = Matrix::Identity(4, 4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double max_gap = 0.0;
  double max_residual = 0.0;
  double max_comm = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double ap = u(rng), bp = u(rng), am = u(rng), bm = u(rng);
    const Matrix op = ap * id + bp * proj(plus);
    const Matrix om = am * id + bm * proj(minus);
    const auto rep = factorization_gap(t, op, om);
    max_gap = std::max(max_gap, std::abs(rep.gap));
    max_residual = std::max(max_residual, std::abs(rep.lhs - am * (ap + bp)));
    max_comm = std::max(max_comm, (op * om - om * op).norm());
  }
  r.checks.push_back(eq("max_gap", max_gap, 0.0));
  r.checks.push_back(eq("max_lhs_residual", max_residual, 0.0));
  r.checks.push_back(eq("max_commutator", max_comm, 0.0));
}

std::string lr_header(const std::string& id, Statistics s) {
  return "id = " + id + "\nstatistics = " + tag(s) + "\nmodes = (L,up) (L,dn) (R,up) (R,dn)\n";
}

void compare_texts(ScenarioResult& r, Statistics s, const std::string& fq, const std::string& fock,
                   const FirstQTensor& built) {
  const auto a = parse_scenario(lr_header("fq", s) + "state = " + fq + "\n");
  const auto b = parse_scenario(lr_header("fock", s) + "state = " + fock + "\n");
  const auto sa = evaluate_state(a);
  const auto sb = evaluate_state(b);
  r.checks.push_back(eq("distance_fq_fock_" + tag(s), distance(sa.state, sb.state), 0.0));
  r.checks.push_back(eq("distance_builder_" + tag(s), distance(to_fock(built, lr_catalog(s)), sb.state), 0.0));
  r.checks.push_back(eq("raw_norm_fq_" + tag(s), sa.raw_norm, 1.0));
  r.checks.push_back(eq("raw_norm_fock_" + tag(s), sb.raw_norm, 1.0));
  r.checks.push_back(flag("roundtrip_" + tag(s), parse_scenario(print_scenario(a)) == a, true));
}

void fock_phi1(ScenarioResult& r, Rng&) {
  compare_texts(r, Statistics::Bose, "sqrt(2)*S[ket(L,up) (x) ket(R,dn)]", "adag(L,up)*adag(R,dn)|vac>",
                phi1(Statistics::Bose));
  compare_texts(r, Statistics::Fermi, "sqrt(2)*A[ket(L,up) (x) ket(R,dn)]", "adag(L,up)*adag(R,dn)|vac>",
                phi1(Statistics::Fermi));
}

void fock_phi2(ScenarioResult& r, Rng&) {
  const std::string fock = "(adag(L,up)*adag(R,dn) + adag(L,dn)*adag(R,up))/sqrt(2)|vac>";
  compare_texts(r, Statistics::Bose, "S[ket(L,up) (x) ket(R,dn) + ket(L,dn) (x) ket(R,up)]", fock,
                phi2(Statistics::Bose));
  compare_texts(r, Statistics::Fermi, "A[ket(L,up) (x) ket(R,dn) + ket(L,dn) (x) ket(R,up)]", fock,
                phi2(Statistics::Fermi));
}

void effdist_bridge(ScenarioResult& r, Rng& rng) {
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto catalog = lr_catalog(s);
    std::vector<FirstQTensor> states{phi1(s), phi2(s)};
    const Matrix c = random_matrix(2, 2, rng);
    FirstQTensor mixed(4, 2, Vector::Zero(16));
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        mixed = mixed + c(a, b) * symmetrize(FirstQTensor::product({lr(0, unit(2, a)), lr(1, unit(2, b))}), s);
      }
    }
    states.push_back(mixed.normalized());
    double fq_residual = 0.0;
    double fock_residual = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Matrix s1 = random_hermitian(2, rng);
      const Matrix s2 = random_hermitian(2, rng);
      const Matrix o1 = embed(s1, 0);
      const Matrix o2 = embed(s2, 1);
      const Matrix p = sym_operator({o1, o2});
      const auto product = lift_single_particle(o1, catalog) * lift_single_particle(o2, catalog);
      for (const auto& t : states) {
        const auto u = effective_distinguish(t, {unit(2, 0), unit(2, 1)}, 2);
        const Complex dist = expectation(u, kron(s1, s2));
        fq_residual = std::max(fq_residual, std::abs(expectation(t, p) - dist));
        fock_residual = std::max(fock_residual, std::abs(expectation(to_fock(t, catalog), product) - dist));
      }
    }
    r.checks.push_back(eq("max_residual_first_quantized_" + tag(s), fq_residual, 0.0));
    r.checks.push_back(eq("max_residual_second_quantized_" + tag(s), fock_residual, 0.0));
  }
}

void sepI_fact(ScenarioResult& r, Rng& rng) {
  const Statistics s = Statistics::Bose;
  // Fixed instance: ψ = (e₊ + e₋)/√2 with A = B = 𝒫(σz, 𝟙).
  {
    const Vector psi = (unit(2, 0) + unit(2, 1)) / std::sqrt(2.0);
    const auto t = FirstQTensor::product({psi, psi});
    const Matrix a = sym_operator({pauli_z(), Matrix::Identity(2, 2)});
    r.checks.push_back(eq("gap_sigma_z", factorization_gap(t, a, a).gap.real(), 2.0));
  }
  double residual = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vector d1 = Vector::Zero(3);
    Vector d2 = Vector::Zero(3);
    for (int i = 0; i < 3; ++i) {
      d1(i) = random_complex(rng).real();
      d2(i) = random_complex(rng).real();
    }
    const Matrix o1 = d1.asDiagonal();
    const Matrix o2 = d2.asDiagonal();
    const Vector psi = (unit(3, 0) + unit(3, 1)) / std::sqrt(2.0);
    const auto t = FirstQTensor::product({psi, psi});
    const Matrix id = Matrix::Identity(3, 3);
    const auto rep = factorization_gap(t, sym_operator({o1, id}), sym_operator({o2, id}));
    const Complex formula = 0.5 * (d1(0) - d1(1)) * (d2(0) - d2(1));
    residual = std::max(residual, std::abs(rep.gap - formula));
  }
  r.checks.push_back(eq("max_formula_residual", residual, 0.0));

  const Matrix o1 = Vector::LinSpaced(3, 1.0, -1.0).cast<Complex>().asDiagonal();
  const Matrix o2 = Vector::LinSpaced(3, 0.0, 2.0).cast<Complex>().asDiagonal();
  const auto pair = make_particle_local_pair(o1, o2);
  const auto t = separable_I_counterexample(pair);
  r.checks.push_back(flag("counterexample_found", t.has_value(), true));
  if (!t) return;
  const auto sym = FirstQTensor(t->dim(), t->particles(), t->amps(), tag_for(s));
  const auto v = is_separable_I(sym, s);
  const Matrix id = Matrix::Identity(3, 3);
  const auto rep = factorization_gap(sym, sym_operator({o1, id}), sym_operator({o2, id}));
  r.checks.push_back(flag("separable_I", v.separable, true));
  r.checks.push_back(greater("abs_gap", std::abs(rep.gap), kTolerance));
  r.checks.push_back(flag("probes_commute", rep.probes_commute, true));
  r.findings.push_back({Definition::I, Criterion::Locality, !(v.separable && !rep.factorizes)});
}

void sepI_effdist(ScenarioResult& r, Rng&) {
  bool complies = true;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto t = phi1(s);
    const auto v = is_separable_I(t, s);
    const bool dist = dist_separable(t);
    r.checks.push_back(flag("separable_I_phi1_" + tag(s), v.separable, false));
    r.checks.push_back(flag("dist_separable_phi1_" + tag(s), dist, true));
    r.checks.push_back(eq("purity_phi1_" + tag(s), std::get<PurityWitness>(v.witness).purity, 0.5));
    complies = complies && v.separable == dist;

    // U exchanges L↓ and R↓.
    Matrix u = Matrix::Identity(4, 4);
    u(kLDn, kLDn) = u(kRDn, kRDn) = 0.0;
    u(kLDn, kRDn) = u(kRDn, kLDn) = 1.0;
    const auto moved = apply_each(u, t);
    const auto target = sym_pair(unit(4, kLUp), unit(4, kLDn), s);
    r.checks.push_back(eq("distance_UU_phi1_" + tag(s), (moved.amps() - target.amps()).norm(), 0.0));
    r.checks.push_back(flag("separable_I_UU_phi1_" + tag(s), is_separable_I(moved, s).separable, false));
  }
  r.findings.push_back({Definition::I, Criterion::EffectiveDistinguishability, complies});
}

void sepII_fact(ScenarioResult& r, Rng& rng) {
  bool complies = true;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    Matrix o = Matrix::Zero(3, 3);
    o(0, 0) = 1.0;
    o(1, 1) = -1.0;
    const Matrix id = Matrix::Identity(3, 3);
    const auto t = sym_pair((unit(3, 0) + unit(3, 1)) / std::sqrt(2.0), unit(3, 2), s);
    const auto v = is_separable_II(t, s);
    const auto rep = factorization_gap(t, sym_operator({o, id}), sym_operator({o, id}));
    r.checks.push_back(flag("separable_II_" + tag(s), v.separable, true));
    r.checks.push_back(eq("gap_" + tag(s), rep.gap.real(), 1.0));
    complies = complies && !(v.separable && !rep.factorizes);

    double residual = 0.0;
    for (int k = 0; k < 20; ++k) {
      Vector d1 = Vector::Zero(3);
      Vector d2 = Vector::Zero(3);
      for (int i = 0; i < 3; ++i) {
        d1(i) = random_complex(rng).real();
        d2(i) = random_complex(rng).real();
      }
      const Matrix o1 = d1.asDiagonal();
      const Matrix o2 = d2.asDiagonal();
      const auto g = factorization_gap(t, sym_operator({o1, id}), sym_operator({o2, id})).gap;
      residual = std::max(residual, std::abs(g - 0.25 * (d1(0) - d1(1)) * (d2(0) - d2(1))));
    }
    r.checks.push_back(eq("max_formula_residual_" + tag(s), residual, 0.0));
  }
  r.findings.push_back({Definition::II, Criterion::Locality, complies});
}

void sepII_freezing(ScenarioResult& r, Rng&) {
  const Vector up = unit(2, 0);
  const Vector dn = unit(2, 1);
  const Vector plus = (unit(2, 0) + unit(2, 1)) / std::sqrt(2.0);
  const Vector minus = (unit(2, 0) - unit(2, 1)) / std::sqrt(2.0);
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix freeze = sym_operator({embed(id, 0), embed(id, 1)});
  const Vector half = 0.5 * up + std::sqrt(0.75) * dn;

  struct Case {
    const char* name;
    Vector sigma2;
    bool separable_after;
  };
  const std::vector<Case> cases{{"overlap0", dn, false}, {"overlap_half", half, false}, {"overlap1", up, true}};
  bool complies = true;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    for (const auto& c : cases) {
      const std::string q = std::string(c.name) + "_" + tag(s);
      const auto zeta_minus = sym_pair(kron(plus, up), kron(minus, c.sigma2), s);
      const auto before = is_separable_II(zeta_minus, s);
      r.checks.push_back(flag("separable_II_before_" + q, before.separable, true));
      FirstQTensor frozen(4, 2, freeze * zeta_minus.amps());
      if (s == Statistics::Bose && c.separable_after) {
        // The bosonic ζ₋ has no L/R component here; ζ₊ carries the case.
        r.checks.push_back(eq("frozen_norm_zeta_minus_" + q, frozen.norm(), 0.0));
        const auto zeta_plus = sym_pair(kron(plus, up), kron(plus, c.sigma2), s);
        frozen = FirstQTensor(4, 2, freeze * zeta_plus.amps());
      }
      const auto normed = FirstQTensor(4, 2, frozen.normalized().amps(), tag_for(s));
      const auto after = is_separable_II(normed, s);
      r.checks.push_back(flag("separable_II_after_" + q, after.separable, c.separable_after));
      if (!c.separable_after) complies = complies && !(before.separable && !after.separable);
    }
  }
  r.findings.push_back({Definition::II, Criterion::EffectiveDistinguishability, complies});
}

OperatorExpr jx(const ModeCatalog& c) {
  const auto x = OperatorExpr::create(c, 0) * OperatorExpr::annihilate(c, 1);
  return Complex(0.5) * (x + x.adjoint());
}

void sepII_interferometer(ScenarioResult& r, Rng&) {
  const auto c = two_mode_catalog(Statistics::Bose);
  const auto g = jx(c);
  const auto fock11 = create_pair(c, 0, 1);
  const auto v = is_separable_II(fock11);
  const double q = qfi_phase(fock11, g);
  r.checks.push_back(flag("separable_II", v.separable, true));
  r.checks.push_back(eq("qfi_fock11", q, 4.0));
  r.checks.push_back(eq("qfi_shot_noise_00", qfi_phase(create_pair(c, 0, 0).normalized(), g), 2.0));
  const Vector plus = (unit(2, 0) + unit(2, 1)) / std::sqrt(2.0);
  const auto pp = FirstQTensor(2, 2, FirstQTensor::product({plus, plus}).amps(), SymTag::Symmetric);
  r.checks.push_back(eq("qfi_plus_pair", qfi_phase(to_fock(pp, c), g), 0.0));
  r.findings.push_back({Definition::II, Criterion::Resources, !(v.separable && q > 2.0 + kTolerance)});
}

void sepIII_perm_det(ScenarioResult& r, Rng&) {
  const auto c = two_mode_catalog(Statistics::Bose);
  const auto fock11 = create_pair(c, 0, 1);
  const auto split = make_sector_local(unit(2, 0), unit(2, 1));
  const auto v = is_separable_III(fock11, split);
  const double q = qfi_phase(fock11, jx(c));
  r.checks.push_back(flag("separable_III", v.separable, true));
  r.checks.push_back(eq("qfi", q, 4.0));
  const auto fermi = create_pair(two_mode_catalog(Statistics::Fermi), 0, 1);
  r.checks.push_back(flag("separable_III_slater", is_separable_III(fermi, split).separable, true));
  r.findings.push_back({Definition::III, Criterion::Resources, !(v.separable && q > 2.0 + kTolerance)});
}

void sepIII_effdist(ScenarioResult& r, Rng&) {
  bool complies = true;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    for (const auto& [name, t] : {std::pair{"phi1", phi1(s)}, std::pair{"phi2", phi2(s)}}) {
      const bool sep = is_separable_III(t, lr_split()).separable;
      const bool dist = dist_separable(t);
      r.checks.push_back(flag(std::string("separable_III_") + name + "_" + tag(s), sep, name == std::string("phi1")));
      complies = complies && sep == dist;
    }
  }
  r.findings.push_back({Definition::III, Criterion::EffectiveDistinguishability, complies});
}

void sepIII_local(ScenarioResult& r, Rng& rng) {
  bool complies = true;
  const std::vector<int> left{kLUp, kLDn};
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto c = lr_catalog(s);
    auto local = [&](int ext) { return lr(ext, random_vector(2, rng)); };
    const auto u = creation(c, local(0));
    const auto u2 = creation(c, local(0));
    const auto w = creation(c, local(1));
    const auto w2 = creation(c, local(1));
    const auto vac = vacuum(c);
    const StateVector parts[3] = {apply(u * u2, vac).normalized(), apply(u * w, vac).normalized(),
                                  apply(w * w2, vac).normalized()};
    const Vector weights = random_vector(3, rng);
    StateVector psi(c);
    for (int k = 0; k < 3; ++k) psi = psi + weights(k) * parts[k];
    psi = psi.normalized();

    const auto v = is_separable_III(psi, lr_split());
    r.checks.push_back(flag("separable_III_" + tag(s), v.separable, true));

    ExplicitDecomposition d;
    d.mixture.push_back({1.0, psi});
    for (int n = 0; n <= 2; ++n) {
      const auto block = project_count(psi, left, n);
      const double p = block.norm() * block.norm();
      if (p < kTolerance) continue;
      d.terms.push_back({p, block.normalized(), block.normalized()});
    }
    double sep2_gap = 0.0;
    double pure_gap = 0.0;
    for (int k = 0; k < 20; ++k) {
      const auto a = lift_single_particle(embed(random_hermitian(2, rng), 0), c);
      const auto b = lift_single_particle(embed(random_hermitian(2, rng), 1), c);
      sep2_gap = std::max(sep2_gap, std::abs(check_sep2(d, a, b).gap));
      pure_gap = std::max(pure_gap, std::abs(factorization_gap(psi, a, b).gap));
    }
    r.checks.push_back(eq("max_sep2_gap_" + tag(s), sep2_gap, 0.0));
    r.checks.push_back(greater("max_pure_gap_" + tag(s), pure_gap, kTolerance));
    complies = complies && !(v.separable && sep2_gap >= kTolerance);
  }
  r.findings.push_back({Definition::III, Criterion::Locality, complies});
}

void sepIV_hybrid_aux0(ScenarioResult& r, Rng& rng) {
  const Statistics s = Statistics::Bose;
  const auto t = sym_pair(unit(4, kLUp), unit(4, kLDn), s);
  const auto x = reduced_X1(t, s, left_k());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(x.matrix);
  r.checks.push_back(entropy("entropy_LupLdn", x.entropy, kLog2));
  r.checks.push_back(eq("x1_eigen_min", eig.eigenvalues()(eig.eigenvalues().size() - 2), 0.5));
  r.checks.push_back(eq("x1_eigen_max", eig.eigenvalues().maxCoeff(), 0.5));
  const auto same = FirstQTensor(4, 2, FirstQTensor::product({unit(4, kLUp), unit(4, kLUp)}).amps(), SymTag::Symmetric);
  r.checks.push_back(entropy("entropy_LupLup", reduced_X1(same, s, left_k()).entropy, 0.0));
  double drift = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix rotated = left_k() * random_unitary(2, rng);
    drift = std::max(drift, (reduced_X1(t, s, rotated).matrix - x.matrix).cwiseAbs().maxCoeff());
  }
  r.checks.push_back(eq("max_rotation_drift", drift, 0.0));
}

double schmidt_entropy(const Matrix& c) {
  double out = 0.0;
  for (double sv : singular_values(c)) {
    const double p = sv * sv;
    if (p > kDropTolerance) out -= p * std::log(p);
  }
  return out;
}

FirstQTensor lr_state(const Matrix& c, Statistics s) {
  FirstQTensor t(4, 2, Vector::Zero(16));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      t = t + (c(a, b) * std::sqrt(2.0)) *
                  symmetrize(FirstQTensor::product({lr(0, unit(2, a)), lr(1, unit(2, b))}), s);
    }
  }
  return FirstQTensor(4, 2, t.amps(), tag_for(s));
}

void sepIV_entIVex(ScenarioResult& r, Rng& rng) {
  bool complies = true;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    double schmidt_residual = 0.0;
    double row_formula_residual = 0.0;
    double generic_deviation = 0.0;
    for (int k = 0; k < 10; ++k) {
      Matrix c = random_matrix(2, 2, rng);
      c /= c.norm();
      const auto t = lr_state(c, s);
      const double ent = reduced_X1(t, s, left_k()).entropy;
      schmidt_residual = std::max(schmidt_residual, std::abs(ent - schmidt_entropy(c)));
      auto mu_entropy = [](const Matrix& m) {
        double out = 0.0;
        for (int a = 0; a < 2; ++a) {
          const double mu = m.row(a).squaredNorm();
          if (mu > kDropTolerance) out -= mu * std::log(mu);
        }
        return out;
      };
      generic_deviation = std::max(generic_deviation, std::abs(ent - mu_entropy(c)));

      // Orthogonal rows: the row weights are the Schmidt weights.
      const Vector w = random_vector(2, rng).cwiseAbs().cast<Complex>();
      const Matrix orth = w.asDiagonal() * random_unitary(2, rng);
      const auto to = lr_state(orth, s);
      row_formula_residual = std::max(row_formula_residual, std::abs(reduced_X1(to, s, left_k()).entropy - mu_entropy(orth)));

      for (const auto* state : {&t, &to}) {
        const bool iv = is_entangled_IV(*state, s, left_k()).separable;
        const bool iii = is_separable_III(*state, lr_split()).separable;
        complies = complies && iv == iii && iv == dist_separable(*state);
      }
    }
    const Matrix prod = random_vector(2, rng) * random_vector(2, rng).transpose();
    const auto tp = lr_state(prod, s);
    r.checks.push_back(entropy("entropy_factorized_" + tag(s), reduced_X1(tp, s, left_k()).entropy, 0.0));
    r.checks.push_back(Check{"max_schmidt_residual_" + tag(s), schmidt_residual, 0.0, kEntropyTolerance,
                             Check::Relation::Equal, 6});
    r.checks.push_back(Check{"max_row_weight_residual_orthogonal_rows_" + tag(s), row_formula_residual, 0.0,
                             kEntropyTolerance, Check::Relation::Equal, 6});
    r.checks.push_back(greater("max_row_weight_deviation_generic_" + tag(s), generic_deviation, kEntropyTolerance));
  }
  r.checks.push_back(flag("IV_III_dist_agree", complies, true));
  r.findings.push_back({Definition::IV, Criterion::EffectiveDistinguishability, complies});
}

void sepIV_local(ScenarioResult& r, Rng&) {
  const Statistics s = Statistics::Bose;
  const Vector up = unit(2, 0);
  const Vector dn = unit(2, 1);
  const Vector plus = (up + dn) / std::sqrt(2.0);
  const Vector minus = (up - dn) / std::sqrt(2.0);
  const Matrix id4 = Matrix::Identity(4, 4);
  auto pair_state = [&](const Vector& v) {
    return FirstQTensor(4, 2, FirstQTensor::product({v, v}).amps(), SymTag::Symmetric);
  };
  auto probe = [&](const FirstQTensor& t, const Vector& alpha, const Vector& alpha_perp) {
    return factorization_gap(t, sym_operator({proj(lr(0, alpha)), id4}), sym_operator({proj(lr(0, alpha_perp)), id4}));
  };
  const auto lup = pair_state(lr(0, up));
  const auto lplus = pair_state(lr(0, plus));

  const bool sep_lup = is_entangled_IV(lup, s, left_k()).separable;
  const bool sep_lplus = is_entangled_IV(lplus, s, left_k()).separable;
  r.checks.push_back(flag("separable_IV_Lup_pair", sep_lup, true));
  r.checks.push_back(flag("separable_IV_Lplus_pair", sep_lplus, true));

  const auto a = probe(lup, up, dn);
  r.checks.push_back(eq("Lup_pair_alpha_up_gap", a.gap.real(), 0.0));
  const auto b = probe(lup, plus, minus);
  r.checks.push_back(eq("Lup_pair_alpha_plus_lhs", b.lhs.real(), 0.5));
  r.checks.push_back(eq("Lup_pair_alpha_plus_rhs", b.rhs.real(), 1.0));
  const auto c = probe(lplus, plus, minus);
  r.checks.push_back(eq("Lplus_pair_alpha_plus_lhs", c.lhs.real(), 0.0));
  r.checks.push_back(eq("Lplus_pair_alpha_plus_rhs", c.rhs.real(), 0.0));
  const auto d = probe(lplus, up, dn);
  r.checks.push_back(eq("Lplus_pair_alpha_up_lhs", d.lhs.real(), 0.5));
  r.checks.push_back(eq("Lplus_pair_alpha_up_rhs", d.rhs.real(), 1.0));

  // Delocalized pair with spatially localized probes.
  const auto deloc = pair_state((lr(0, up) + lr(1, up)) / std::sqrt(2.0));
  const auto e = factorization_gap(deloc, sym_operator({embed(pauli_z(), 0), id4}), sym_operator({embed(pauli_z(), 1), id4}));
  r.checks.push_back(eq("delocalized_lhs", e.lhs.real(), 0.5));
  r.checks.push_back(eq("delocalized_rhs", e.rhs.real(), 1.0));
  r.checks.push_back(flag("delocalized_probes_commute", e.probes_commute, true));

  r.findings.push_back({Definition::IV, Criterion::Locality, !((sep_lup && !b.factorizes) || (sep_lplus && !d.factorizes))});
}

void sepIV_measurement(ScenarioResult& r, Rng&) {
  const auto c = lr_catalog(Statistics::Bose);
  const auto basis = sector_basis(c, 2);
  const auto m = sector_matrix(lift_single_particle(embed(pauli_z(), 0), c), 2);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);

  const Vector plus = (unit(2, 0) + unit(2, 1)) / std::sqrt(2.0);
  const auto pre = to_fock(FirstQTensor(4, 2, FirstQTensor::product({lr(0, plus), lr(0, plus)}).amps(),
                                        SymTag::Symmetric),
                           c);
  const Vector v = to_dense(pre, basis);
  Vector kept = Vector::Zero(v.size());
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    if (std::abs(eig.eigenvalues()(k)) < kTolerance) {
      const Vector e = eig.eigenvectors().col(k);
      kept += e * e.dot(v);
    }
  }
  const double p = kept.squaredNorm();
  const auto post = from_dense(c, basis, kept).normalized();
  const auto target = create_pair(c, kLUp, kLDn);
  const bool sep_pre = is_entangled_IV(pre, left_k()).separable;
  const auto post_v = is_entangled_IV(post, left_k());
  r.checks.push_back(flag("separable_IV_before", sep_pre, true));
  r.checks.push_back(eq("probability", p, 0.5));
  r.checks.push_back(eq("distance_to_LupLdn", distance(post, target), 0.0));
  r.checks.push_back(entropy("entropy_after", std::get<EntropyWitness>(post_v.witness).entropy, kLog2));

  for (const auto& [name, i, j, k] : {std::tuple{"L", kLUp, kLDn, left_k()}, std::tuple{"R", kRUp, kRDn, right_k()}}) {
    const auto s = create_pair(c, i, j);
    const Vector sv = to_dense(s, basis);
    const double eigen_residual = (m * sv - sv.dot(m * sv) * sv).norm();
    r.checks.push_back(eq(std::string("eigen_residual_") + name, eigen_residual, 0.0));
    r.checks.push_back(entropy(std::string("entropy_") + name + "up" + name + "dn", reduced_X1(s, k).entropy, kLog2));
  }
  r.findings.push_back({Definition::IV, Criterion::Resources, !(sep_pre && p > kTolerance && !post_v.separable)});
}

void sepIV_effdist(ScenarioResult& r, Rng&) {
  bool complies = true;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto e1 = reduced_X1(phi1(s), s, left_k()).entropy;
    const auto e2 = reduced_X1(phi2(s), s, left_k()).entropy;
    r.checks.push_back(entropy("entropy_phi1_" + tag(s), e1, 0.0));
    r.checks.push_back(entropy("entropy_phi2_" + tag(s), e2, kLog2));
    complies = complies && (e1 <= kEntropyTolerance) == dist_separable(phi1(s)) &&
               (e2 <= kEntropyTolerance) == dist_separable(phi2(s));
  }
  r.findings.push_back({Definition::IV, Criterion::EffectiveDistinguishability, complies});
}

void mode_sweep(ScenarioResult& r, Rng& rng, int index, int probes, bool product) {
  const Statistics s = index % 2 == 0 ? Statistics::Bose : Statistics::Fermi;
  const auto c = lr_catalog(s);
  const auto bip = lr_bipartition();
  static const std::pair<int, int> kSplits[] = {{1, 1}, {2, 1}, {1, 2}, {0, 2}, {2, 2}};
  StateVector psi(c);
  if (product) {
    const auto [nl, nr] = kSplits[index % 5];
    psi = random_product_state(c, bip, nl, nr, rng);
  } else {
    psi = random_sector_state(c, 2, rng);
  }
  const auto v = is_separable_V(psi, bip);
  const auto sweep = probe_sweep(psi, bip, ProbeSweepConfig{probes, rng()});
  r.checks.push_back(flag("separable_V", v.separable, product));
  if (product) {
    r.checks.push_back(Check{"max_gap", sweep.max_gap, 0.0, kEntropyTolerance});
  } else {
    r.checks.push_back(greater("max_gap", sweep.max_gap, kEntropyTolerance));
  }
  r.findings.push_back({Definition::V, Criterion::Locality, v.separable == (sweep.max_gap < kEntropyTolerance)});
}

void sepV_effdist(ScenarioResult& r, Rng&) {
  bool complies = true;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto c = lr_catalog(s);
    for (const auto& [name, t] : {std::pair{"phi1", phi1(s)}, std::pair{"phi2", phi2(s)}}) {
      const bool sep = is_separable_V(to_fock(t, c), lr_bipartition()).separable;
      r.checks.push_back(flag(std::string("separable_V_") + name + "_" + tag(s), sep, name == std::string("phi1")));
      complies = complies && sep == dist_separable(t);
    }
  }
  r.findings.push_back({Definition::V, Criterion::EffectiveDistinguishability, complies});
}

void sepV_resources(ScenarioResult& r, Rng&) {
  const auto c = two_mode_catalog(Statistics::Bose);
  const auto bip = make_mode_bipartition({0}, {1}, 2);
  const auto g = jx(c);
  const auto fock11 = create_pair(c, 0, 1);
  const bool sep = is_separable_V(fock11, bip).separable;
  int cross = 0;
  for (const auto& [mono, coeff] : g.terms()) {
    std::set<int> modes(mono.creators.begin(), mono.creators.end());
    modes.insert(mono.annihilators.begin(), mono.annihilators.end());
    if (modes.count(0) && modes.count(1)) ++cross;
  }
  const auto evolved = evolve(fock11, g, std::numbers::pi / 2.0, 2);
  const auto ev = is_separable_V(evolved, bip);
  const double q = qfi_phase(fock11, g);
  r.checks.push_back(flag("separable_V", sep, true));
  r.checks.push_back(greater("cross_partition_terms_Jx", cross, 0.0));
  r.checks.push_back(flag("separable_V_evolved", ev.separable, false));
  r.checks.push_back(eq("schmidt_rank_evolved", static_cast<double>(numerical_rank(std::get<SchmidtWitness>(ev.witness).values)), 2.0));
  r.checks.push_back(eq("qfi", q, 4.0));
  // The advantage needs a generator outside the mode-local algebras.
  r.findings.push_back({Definition::V, Criterion::Resources, sep && cross > 0 && !ev.separable});
}

void sep2_mixture(ScenarioResult& r, Rng&) {
  const auto c = lr_catalog(Statistics::Fermi);
  const auto vac = vacuum(c);
  const auto a = OperatorExpr::number(c, kLUp);
  const auto b = OperatorExpr::number(c, kRDn);
  ExplicitDecomposition d;
  d.mixture = {{0.5, create_pair(c, kLUp, kRDn)}, {0.5, create_pair(c, kLDn, kRUp)}};
  d.terms = {{0.5, apply_create(kLUp, vac), apply_create(kRDn, vac)},
             {0.5, apply_create(kLDn, vac), apply_create(kRUp, vac)}};
  const auto rep = check_sep2(d, a, b);
  r.checks.push_back(eq("classical_lhs", rep.lhs.real(), 0.5));
  r.checks.push_back(eq("classical_gap", std::abs(rep.gap), 0.0));

  const auto phi = to_fock(phi2(Statistics::Fermi), c);
  ExplicitDecomposition self;
  self.mixture = {{1.0, phi}};
  self.terms = {{1.0, phi, phi}};
  const auto bad = check_sep2(self, a, b);
  r.checks.push_back(eq("self_lhs", bad.lhs.real(), 0.5));
  r.checks.push_back(eq("self_rhs", bad.rhs.real(), 0.25));
  r.checks.push_back(flag("self_factorizes", bad.factorizes, false));
}

std::vector<std::pair<std::string, Runner>> corpus(const ReproConfig& config) {
  std::vector<std::pair<std::string, Runner>> out{
      {"bell-probe", bell_probe},
      {"bell-global-observables", bell_global},
      {"fock-phi1", fock_phi1},
      {"fock-phi2", fock_phi2},
      {"effdist-bridge", effdist_bridge},
      {"sepI-fact-counterexample", sepI_fact},
      {"sepI-effdist", sepI_effdist},
      {"sepII-fact-counterexample", sepII_fact},
      {"sepII-freezing", sepII_freezing},
      {"sepII-interferometer", sepII_interferometer},
      {"sepIII-perm-det", sepIII_perm_det},
      {"sepIII-effdist", sepIII_effdist},
      {"sepIII-local", sepIII_local},
      {"sepIV-hybrid-aux0", sepIV_hybrid_aux0},
      {"sepIV-entIVex", sepIV_entIVex},
      {"sepIV-local", sepIV_local},
      {"sepIV-measurement", sepIV_measurement},
      {"sepIV-effdist", sepIV_effdist},
      {"sepV-effdist", sepV_effdist},
      {"sepV-resources", sepV_resources},
      {"sep2-mixture", sep2_mixture},
  };
  const int probes = config.probes;
  for (int k = 0; k < 50; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "modeV-sweep-%02d", k);
    out.push_back({id, [k, probes](ScenarioResult& r, Rng& rng) { mode_sweep(r, rng, k, probes, true); }});
  }
  for (int k = 0; k < 10; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "modeV-entangled-%02d", k);
    out.push_back({id, [k, probes](ScenarioResult& r, Rng& rng) { mode_sweep(r, rng, k, probes, false); }});
  }
  return out;
}

std::uint64_t scenario_seed(std::uint64_t seed, const std::string& id) {
  // FNV-1a keeps per-scenario streams independent of corpus order.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : id) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return seed ^ h;
}

std::string fixed(double v, int decimals) {
  if (std::abs(v) < 5e-13) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string expected_text(const Check& c) {
  return (c.relation == Check::Relation::Greater ? ">" : "") + fixed(c.expected, c.decimals);
}

std::string tolerance_text(double t) {
  if (t == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", t);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ReproReport run_repro_suite(const ReproConfig& config) {
  ReproReport report{config, {}};
  for (auto& [id, run] : corpus(config)) {
    ScenarioResult r{id, {}, {}, {}};
    Rng rng(scenario_seed(config.seed, id));
    try {
      run(r, rng);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    report.scenarios.push_back(std::move(r));
  }
  std::sort(report.scenarios.begin(), report.scenarios.end(),
            [](const ScenarioResult& a, const ScenarioResult& b) { return a.id < b.id; });
  return report;
}

std::string report_csv(const ReproReport& r) {
  std::string out = "scenario,quantity,value,expected,tolerance,status\n";
  for (const auto& s : r.scenarios) {
    if (!s.error.empty()) {
      out += s.id + ",error," + csv_field(s.error) + ",,,fail\n";
      continue;
    }
    for (const auto& c : s.checks) {
      out += s.id + "," + c.quantity + "," + fixed(c.value, c.decimals) + "," + expected_text(c) + "," +
             tolerance_text(c.tolerance) + "," + (c.pass() ? "pass" : "fail") + "\n";
    }
  }
  return out;
}

std::string report_markdown(const ReproReport& r) {
  std::size_t failed = 0;
  for (const auto& s : r.scenarios) failed += s.passed() ? 0 : 1;
  std::string out = "# Reproduction report\n\nseed " + std::to_string(r.config.seed) + ", " +
                    std::to_string(r.scenarios.size()) + " scenarios, " + std::to_string(failed) + " failed\n";
  for (const auto& s : r.scenarios) {
    out += "\n## " + s.id + (s.passed() ? "" : " (FAILED)") + "\n\n";
    if (!s.error.empty()) {
      out += "error: " + s.error + "\n";
      continue;
    }
    out += "| quantity | value | expected | tolerance | status |\n|---|---|---|---|---|\n";
    for (const auto& c : s.checks) {
      out += "| " + c.quantity + " | " + fixed(c.value, c.decimals) + " | " + expected_text(c) + " | " +
             tolerance_text(c.tolerance) + " | " + (c.pass() ? "pass" : "fail") + " |\n";
    }
    for (const auto& f : s.findings) {
      out += "\nfinding: " + std::string(to_string(f.definition)) + " / " + std::string(to_string(f.criterion)) +
             (f.complies ? " complies" : " violated") + "\n";
    }
  }
  return out;
}

VerdictTable generate_table1(const ReproReport& r) {
  VerdictTable t;
  std::array<std::array<bool, 3>, 5> violated{};
  for (const auto& s : r.scenarios) {
    for (const auto& f : s.findings) {
      const auto row = static_cast<std::size_t>(f.definition);
      const auto col = static_cast<std::size_t>(f.criterion);
      if (!s.passed()) {
        throw Error("cell " + std::string(to_string(f.definition)) + "/" + std::string(to_string(f.criterion)) +
                    " is backed by failing scenario " + s.id);
      }
      auto& e = t.cells[row][col];
      if (e.scenarios.empty() || e.scenarios.back() != s.id) e.scenarios.push_back(s.id);
      if (!f.complies) violated[row][col] = true;
    }
  }
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      auto& e = t.cells[i][j];
      e.cell = e.scenarios.empty() ? Cell::Open : violated[i][j] ? Cell::Fail : Cell::Pass;
    }
  }
  return t;
}

std::string_view glyph(Cell c) {
  switch (c) {
    case Cell::Pass:
      return "✓";
    case Cell::Fail:
      return "✗";
    case Cell::Open:
      return "?";
  }
  return "?";
}

namespace {

constexpr Definition kRows[] = {Definition::I, Definition::II, Definition::III, Definition::IV, Definition::V};
constexpr const char* kColumns[] = {"local operators", "effective distinguishability", "information resources"};

std::string backing(const VerdictTable::Entry& e) {
  if (e.scenarios.empty()) return "open";
  // Long sweeps are summarized by count.
  std::map<std::string, int> families;
  std::vector<std::string> order;
  for (const auto& id : e.scenarios) {
    const auto dash = id.find_last_of('-');
    const bool numbered = dash != std::string::npos && dash + 1 < id.size() &&
                          std::all_of(id.begin() + static_cast<std::ptrdiff_t>(dash) + 1, id.end(), ::isdigit);
    const auto key = numbered ? id.substr(0, dash) + "-*" : id;
    if (families[key]++ == 0) order.push_back(key);
  }
  std::string out;
  for (const auto& k : order) {
    if (!out.empty()) out += ", ";
    out += k;
    if (families[k] > 1) out += " (" + std::to_string(families[k]) + ")";
  }
  return out;
}

}  // namespace

std::string table_markdown(const VerdictTable& t) {
  std::string out = "| definition | local operators | effective distinguishability | information resources |\n";
  out += "|---|---|---|---|\n";
  for (std::size_t i = 0; i < 5; ++i) {
    out += "| " + std::string(to_string(kRows[i])) + " |";
    for (std::size_t j = 0; j < 3; ++j) out += " " + std::string(glyph(t.cells[i][j].cell)) + " |";
    out += "\n";
  }
  out += "\nbacking scenarios:\n\n";
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      out += "- " + std::string(to_string(kRows[i])) + " / " + kColumns[j] + ": " + backing(t.cells[i][j]) + "\n";
    }
  }
  return out;
}

std::string table_csv(const VerdictTable& t) {
  std::string out = "definition,local_operators,effective_distinguishability,information_resources\n";
  for (std::size_t i = 0; i < 5; ++i) {
    out += std::string(to_string(kRows[i]));
    for (std::size_t j = 0; j < 3; ++j) out += "," + std::string(glyph(t.cells[i][j].cell));
    out += "\n";
  }
  return out;
}

}  // namespace entwb
