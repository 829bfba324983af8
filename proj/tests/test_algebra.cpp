#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entwb/algebra.hpp"
#include "entwb/correlations.hpp"
#include "entwb/firstq.hpp"
#include "oracles.hpp"

using namespace entwb;

namespace {

ModeCatalog cat(Statistics s, int n = 4) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return ModeCatalog(labels, s);
}

}  // namespace

TEST_CASE("normal ordering of a a†") {
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto c = cat(s, 2);
    const auto product = OperatorExpr::annihilate(c, 1) * OperatorExpr::create(c, 1);
    const auto expected = OperatorExpr::identity(c) + Complex(exchange_sign(s)) * OperatorExpr::number(c, 1);
    CHECK(product.distance(expected) < 1e-12);
    const auto cross = OperatorExpr::annihilate(c, 0) * OperatorExpr::create(c, 1);
    CHECK(cross.terms().size() == 1);
  }
  const auto f = cat(Statistics::Fermi, 2);
  CHECK((OperatorExpr::create(f, 0) * OperatorExpr::create(f, 0)).is_zero());
  const auto swapped = OperatorExpr::create(f, 1) * OperatorExpr::create(f, 0);
  CHECK(swapped.distance(Complex(-1.0) * (OperatorExpr::create(f, 0) * OperatorExpr::create(f, 1))) < 1e-12);
}

TEST_CASE("products act as composition") {
  Rng rng(17);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto c = cat(s);
    for (int k = 0; k < 20; ++k) {
      const auto a = random_mode_local_probe(c, {0, 1, 2, 3}, rng);
      const auto b = random_mode_local_probe(c, {0, 2}, rng);
      const auto st = random_sector_state(c, 2, rng);
      CHECK(distance(apply(a * b, st), apply(a, apply(b, st))) < 1e-9);
      CHECK(distance(apply(multiply(a, b), st), apply(a * b, st)) < 1e-12);
    }
  }
}

TEST_CASE("adjoint and hermiticity") {
  Rng rng(2);
  const auto c = cat(Statistics::Fermi);
  const auto a = random_mode_local_probe(c, {0, 1, 2}, rng);
  const OperatorExpr x(c, {{Monomial{{0, 2}, {1}}, Complex(1.0, 2.0)}, {Monomial{{}, {3}}, 0.5}});
  CHECK(x.adjoint().adjoint().distance(x) < 1e-12);
  CHECK_FALSE(x.is_hermitian());
  CHECK(a.is_hermitian());
  CHECK(std::abs(expectation(random_sector_state(c, 2, rng), a).imag()) < 1e-12);
}

TEST_CASE("lifted one-body operators match the symmetrized first-quantized form") {
  Rng rng(4);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const auto c = cat(s, 3);
    const Matrix o = random_matrix(3, 3, rng);
    const auto lifted = lift_single_particle(o, c);
    const Matrix sym = sym_operator({o, Matrix::Identity(3, 3)});
    const auto basis = sector_basis(c, 2);
    for (int k = 0; k < 5; ++k) {
      const auto st = from_dense(c, basis, random_vector(static_cast<Eigen::Index>(basis.size()), rng));
      const auto t = from_fock(st);
      const auto via_fock = from_fock(apply(lifted, st));
      CHECK((via_fock.amps() - sym * t.amps()).norm() < 1e-10);
    }
  }
}

TEST_CASE("commutator norms") {
  Rng rng(6);
  const auto c = cat(Statistics::Bose);
  const Matrix s1 = random_hermitian(2, rng);
  const Matrix s2 = random_hermitian(2, rng);
  Matrix pl = Matrix::Zero(2, 2);
  Matrix pr = Matrix::Zero(2, 2);
  pl(0, 0) = 1.0;
  pr(1, 1) = 1.0;
  const auto al = lift_single_particle(kron(pl, s1), c);
  const auto ar = lift_single_particle(kron(pr, s2), c);
  for (int n = 0; n <= 3; ++n) CHECK(commutator_norm(al, ar, n) < 1e-12);

  Matrix d1 = Matrix::Zero(4, 4);
  Matrix d2 = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    d1(i, i) = i;
    d2(i, i) = 1.0 - i;
  }
  CHECK(commutator_norm(lift_single_particle(d1, c), lift_single_particle(d2, c), 2) < 1e-12);

  const auto hop = OperatorExpr::create(c, 0) * OperatorExpr::annihilate(c, 1);
  CHECK(commutator_norm(hop, hop.adjoint(), 1) > 0.5);
}

TEST_CASE("sector matrices and norms") {
  const auto c = cat(Statistics::Bose, 2);
  const auto n0 = OperatorExpr::number(c, 0);
  const Matrix m = sector_matrix(n0, 2);
  CHECK(m.rows() == 3);
  CHECK(std::abs(restricted_norm(n0, 2) - 2.0) < 1e-12);
  const auto mixed = OperatorExpr::create(c, 0) + OperatorExpr::number(c, 1);
  CHECK_THROWS_AS(sector_matrix(mixed, 1), Error);
  CHECK(restricted_norm(mixed, 1) > 1.0);
  CHECK(std::abs(expectation(vacuum(c), n0)) < 1e-15);
}

TEST_CASE("subalgebra admission") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK_THROWS_AS(make_particle_local_pair(x, z), Error);
  CHECK_NOTHROW(make_particle_local_pair(z, Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(make_mode_bipartition({0}, {0, 1}, 2), Error);
  CHECK_THROWS_AS(make_mode_bipartition({0}, {1}, 3), Error);
  const auto bip = make_mode_bipartition({2, 0}, {1}, 3);
  CHECK(bip.left == std::vector<int>{0, 2});
  Matrix v1 = Matrix::Zero(2, 1);
  v1(0, 0) = 1.0;
  CHECK_THROWS_AS(make_sector_local(v1, v1), Error);
}

TEST_CASE("global observables on a Bell pair") {
  const Vector up = (Vector(2) << 1.0, 0.0).finished();
  const Vector dn = (Vector(2) << 0.0, 1.0).finished();
  const Vector plus = (kron(up, up) + kron(dn, dn)) / std::sqrt(2.0);
  const Vector minus = (kron(up, up) - kron(dn, dn)) / std::sqrt(2.0);
  const Matrix id = Matrix::Identity(4, 4);
  const Matrix op = 3.0 * id + 4.0 * plus * plus.adjoint();
  const Matrix om = 1.0 * id + 2.0 * minus * minus.adjoint();
  CHECK(std::abs(plus.dot(op * om * plus) - 7.0) < 1e-12);
  CHECK(std::abs(expectation(FirstQTensor(2, 2, plus), op * om) - 7.0) < 1e-12);
}
