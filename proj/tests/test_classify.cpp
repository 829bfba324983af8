#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entwb/classify.hpp"
#include "oracles.hpp"

using namespace entwb;

namespace {

Vector unit(int d, int i) {
  Vector v = Vector::Zero(d);
  v(i) = 1.0;
  return v;
}

FirstQTensor pair_state(const Vector& x, const Vector& y, Statistics s) {
  return symmetrize(FirstQTensor::product({x, y}), s).normalized();
}

double oracle_purity(const FirstQTensor& t) {
  const Matrix c = oracle::reshape(t.amps(), t.dim(), t.dim());
  const Matrix rho = c * c.adjoint();
  return (rho * rho).trace().real();
}

FirstQTensor random_pair(int d, Statistics s, Rng& rng) {
  return symmetrize(FirstQTensor(d, 2, random_vector(d * d, rng)), s).normalized();
}

StateVector create_pair(const ModeCatalog& c, int i, int j) {
  return apply_create(static_cast<std::size_t>(i), apply_create(static_cast<std::size_t>(j), vacuum(c)));
}

}  // namespace

TEST_CASE("definition names") {
  CHECK(parse_definition("IV") == Definition::IV);
  CHECK(to_string(Definition::III) == "III");
  CHECK_THROWS_AS(parse_definition("VI"), Error);
}

TEST_CASE("separable I is purity one") {
  Rng rng(3);
  const auto psi = oracle::unit_random(3, rng);
  const auto product = FirstQTensor(3, 2, FirstQTensor::product({psi, psi}).amps(), SymTag::Symmetric);
  const auto v = is_separable_I(product, Statistics::Bose);
  CHECK(v.separable);
  CHECK(std::abs(std::get<PurityWitness>(v.witness).purity - 1.0) < 1e-12);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    for (int k = 0; k < 10; ++k) {
      const auto t = random_pair(3, s, rng);
      const auto r = is_separable_I(t, s);
      CHECK(std::abs(std::get<PurityWitness>(r.witness).purity - oracle_purity(t)) < 1e-10);
      CHECK_FALSE(r.separable);
    }
  }
}

TEST_CASE("separable II agrees with the product-overlap oracle") {
  Rng rng(42);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const bool fermi = s == Statistics::Fermi;
    int separable = 0;
    for (int k = 0; k < 50; ++k) {
      const auto t = random_pair(3, s, rng);
      const double overlap = oracle::product_pair_overlap(oracle::reshape(t.amps(), 3, 3), fermi, 20, rng);
      const auto v = is_separable_II(t, s);
      CHECK(v.separable == (overlap > 1.0 - 1e-6));
      separable += v.separable ? 1 : 0;
    }
    // Every antisymmetric two-particle state in three dimensions is a single determinant.
    CHECK(separable == (fermi ? 50 : 0));

    for (int k = 0; k < 10; ++k) {
      const Vector x = oracle::unit_random(3, rng);
      Vector y = oracle::unit_random(3, rng);
      y = (y - x * x.dot(y)).normalized();
      CHECK(is_separable_II(pair_state(x, y, s), s).separable);
    }
  }
  Rng r2(5);
  const Vector x = oracle::unit_random(3, r2);
  CHECK(is_separable_II(pair_state(x, x, Statistics::Bose), Statistics::Bose).separable);
  const Vector y = oracle::unit_random(3, r2);
  CHECK_FALSE(is_separable_II(pair_state(x, y, Statistics::Bose), Statistics::Bose).separable);
}

TEST_CASE("separable II beyond two particles needs the search") {
  const auto t = symmetrize(FirstQTensor::basis_product(4, {0, 1, 2}), Statistics::Fermi).normalized();
  CHECK_THROWS_AS(is_separable_II(t, Statistics::Fermi), Error);
  SeparableIIOptions opt;
  opt.brute_force = true;
  const auto v = is_separable_II(t, Statistics::Fermi, opt);
  CHECK(v.separable);
  CHECK(std::get<SearchWitness>(v.witness).overlap > 1.0 - 1e-6);
}

TEST_CASE("separable III is one populated sector of rank one") {
  const int d = 4;
  Matrix v1 = Matrix::Zero(d, 2);
  Matrix v2 = Matrix::Zero(d, 2);
  v1(0, 0) = v1(1, 1) = 1.0;
  v2(2, 0) = v2(3, 1) = 1.0;
  const auto split = make_sector_local(v1, v2);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    CHECK(is_separable_III(pair_state(unit(d, 0), unit(d, 2), s), split).separable);
    const auto ent = (pair_state(unit(d, 0), unit(d, 2), s) + pair_state(unit(d, 1), unit(d, 3), s)).normalized();
    const auto v = is_separable_III(ent, split);
    CHECK_FALSE(v.separable);
    const auto& w = std::get<SectorWitness>(v.witness);
    REQUIRE(w.sectors.size() == 1);
    const Matrix block = oracle::reshape(ent.amps(), d, d).block(0, 2, 2, 2);
    CHECK(w.sectors[0].rank == oracle::rank(block));
    const auto mixed = (pair_state(unit(d, 0), unit(d, 2), s) + pair_state(unit(d, 0), unit(d, 1), s)).normalized();
    CHECK(std::get<SectorWitness>(is_separable_III(mixed, split).witness).sectors.size() == 2);
  }
}

TEST_CASE("entanglement IV from the reduced X1 entropy") {
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const ModeCatalog c({"L,up", "L,dn", "R,up", "R,dn"}, s);
    Matrix k = Matrix::Zero(4, 2);
    k(0, 0) = k(1, 1) = 1.0;
    const auto product = create_pair(c, 0, 3);
    const auto pv = is_entangled_IV(product, k);
    CHECK(pv.separable);
    CHECK(std::get<EntropyWitness>(pv.witness).entropy < kEntropyTolerance);

    const auto singlet = Complex(1.0 / std::sqrt(2.0)) * (create_pair(c, 0, 3) - create_pair(c, 1, 2));
    const auto x = reduced_X1(singlet, k);
    CHECK(std::abs(x.entropy - std::log(2.0)) < kEntropyTolerance);
    CHECK(std::abs(x.matrix.trace() - 1.0) < 1e-12);
    CHECK_FALSE(is_entangled_IV(singlet, k).separable);

    CHECK_THROWS_AS(reduced_X1(create_pair(c, 2, 3), k), Error);
  }
}

TEST_CASE("separable V with interleaved fermionic modes") {
  const ModeCatalog c({"L,up", "R,up", "L,dn", "R,dn"}, Statistics::Fermi);
  const auto bip = make_mode_bipartition({0, 2}, {1, 3}, 4);
  CHECK(is_separable_V(create_pair(c, 0, 1), bip).separable);
  const auto ent = Complex(1.0 / std::sqrt(2.0)) * (create_pair(c, 0, 1) + create_pair(c, 2, 3));
  const auto v = is_separable_V(ent, bip);
  CHECK_FALSE(v.separable);
  const auto& w = std::get<SchmidtWitness>(v.witness).values;
  REQUIRE(w.size() >= 2);
  CHECK(std::abs(w[0] - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(w[1] - 1.0 / std::sqrt(2.0)) < 1e-12);
  // Same-side pairs are products regardless of ordering signs.
  CHECK(is_separable_V(create_pair(c, 0, 2), bip).separable);
  CHECK(is_separable_V(Complex(1.0 / std::sqrt(2.0)) * (create_pair(c, 0, 2) + create_pair(c, 1, 3)), bip).separable ==
        false);
}

TEST_CASE("phase sensitivity") {
  const ModeCatalog c({"0", "1"}, Statistics::Bose);
  const auto jx = Complex(0.5) * (OperatorExpr::create(c, 0) * OperatorExpr::annihilate(c, 1) +
                                  OperatorExpr::create(c, 1) * OperatorExpr::annihilate(c, 0));
  const auto twin = create_pair(c, 0, 1);
  const auto basis = sector_basis(c, 2);
  const double expected = oracle::variance_qfi(sector_matrix(jx, 2), to_dense(twin, basis));
  CHECK(std::abs(expected - 4.0) < 1e-12);
  CHECK(std::abs(qfi_phase(twin, jx) - expected) < 1e-12);
  CHECK_THROWS_AS(qfi_phase(twin, OperatorExpr::create(c, 0) * OperatorExpr::annihilate(c, 1)), Error);

  const Vector psi = (Vector(2) << 1.0, 1.0).finished() / std::sqrt(2.0);
  Matrix sx = Matrix::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 0.5;
  const Matrix g = sym_operator({sx, Matrix::Identity(2, 2)});
  const auto t = FirstQTensor::product({psi, psi});
  CHECK(std::abs(qfi_phase(t, g) - oracle::variance_qfi(g, t.amps())) < 1e-12);
}

TEST_CASE("verdict summaries") {
  const auto v = is_separable_I(FirstQTensor::basis_product(2, {0, 0}), Statistics::Bose);
  CHECK(v.summary().find("separable") != std::string::npos);
  CHECK(v == v);
}
