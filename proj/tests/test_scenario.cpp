#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "entwb/scenario.hpp"
#include "oracles.hpp"

using namespace entwb;

namespace {

const char* kBell = R"(# comment line
id = bell-like
statistics = fermi
modes = (L,up) (L,dn) (R,up) (R,dn)
state = (adag(L,up)*adag(R,dn) + adag(L,dn)*adag(R,up))|vac>
definition = V
partition = modes (L,up) (L,dn) | (R,up) (R,dn)
probe A = adag(L,up)*a(L,up)
probe B = adag(R,dn)*a(R,dn)
expect verdict = entangled
expect gap = 0.25
)";

std::string with_state(const std::string& statistics, const std::string& state) {
  return "id = t\nstatistics = " + statistics + "\nmodes = (L,up) (L,dn) (R,up) (R,dn)\nstate = " + state + "\n";
}

ExprPtr leaf(Expr::Kind k, Complex v = {}, std::string label = {}) {
  return std::make_shared<const Expr>(Expr{k, v, std::move(label), {}});
}

ExprPtr node(Expr::Kind k, std::vector<ExprPtr> args) {
  return std::make_shared<const Expr>(Expr{k, {}, {}, std::move(args)});
}

ExprPtr random_expr(Rng& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 11 : 4);
  const char* labels[] = {"L,up", "R,dn", "x"};
  std::uniform_int_distribution<int> lab(0, 2);
  std::uniform_int_distribution<int> num(0, 40);
  switch (pick(rng)) {
    case 0: return leaf(Expr::Kind::Number, num(rng) / 4.0);
    case 1: return leaf(Expr::Kind::Create, {}, labels[lab(rng)]);
    case 2: return leaf(Expr::Kind::Annihilate, {}, labels[lab(rng)]);
    case 3: return leaf(Expr::Kind::Ket, {}, labels[lab(rng)]);
    case 4: return leaf(Expr::Kind::Vac);
    case 5: return node(Expr::Kind::Add, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 6: return node(Expr::Kind::Sub, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 7: return node(Expr::Kind::Mul, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 8: return node(Expr::Kind::Div, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 9: return node(Expr::Kind::Tensor, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 10: return node(Expr::Kind::Neg, {random_expr(rng, depth - 1)});
    default: return node(Expr::Kind::Sym, {random_expr(rng, depth - 1)});
  }
}

}  // namespace

TEST_CASE("parse the documented example") {
  const auto s = parse_scenario(kBell);
  CHECK(s.id == "bell-like");
  CHECK(s.statistics == Statistics::Fermi);
  CHECK(s.modes == std::vector<std::string>{"L,up", "L,dn", "R,up", "R,dn"});
  REQUIRE(s.definition.has_value());
  CHECK(*s.definition == Definition::V);
  REQUIRE(s.partition.has_value());
  CHECK(s.partition->kind == PartitionDecl::Kind::Modes);
  CHECK(s.partition->right == std::vector<std::string>{"R,up", "R,dn"});
  CHECK(s.expectations.size() == 2);
  const auto st = evaluate_state(s);
  CHECK(std::abs(st.raw_norm - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(check_scenario(s).gap - 0.25) < 1e-12);
  for (const auto& c : run_expectations(s)) CHECK(c.pass);
}

TEST_CASE("scenario round trip") {
  const auto s = parse_scenario(kBell);
  const auto text = print_scenario(s);
  CHECK(parse_scenario(text) == s);
  CHECK(print_scenario(parse_scenario(text)) == text);
}

TEST_CASE("expression round trip on random trees") {
  Rng rng(99);
  for (int k = 0; k < 500; ++k) {
    const auto e = random_expr(rng, 4);
    const auto text = print_expr(*e);
    INFO(text);
    CHECK(same_expr(parse_expr(text), e));
  }
  for (const char* text : {"sqrt(2)*S[ket(L,up) (x) ket(R,dn)]", "-(1 + 2i)*adag(a)|vac>", "a(x)*adag(x) - 1",
                           "A[ket(a) (x) ket(b)] / sqrt(2)", "2.5e-1*i"}) {
    const auto e = parse_expr(text);
    CHECK(same_expr(parse_expr(print_expr(*e)), e));
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_expr("adag(L,up");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 10);
  }
  try {
    parse_expr("2 + * 3", 4);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 5);
  }
  try {
    parse_scenario(with_state("fermi", "adag(X,up)|vac>"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 14);
  }
  CHECK_THROWS_AS(parse_scenario(with_state("fermi", "adag(L,up)|vac>") + "id = again\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("id = t\nstatistics = bose\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(with_state("anyon", "adag(L,up)|vac>")), ParseError);
  CHECK_THROWS_AS(parse_scenario(with_state("bose", "adag(L,up)|vac>") + "definition = IV\n"), ParseError);
}

TEST_CASE("state evaluation") {
  const auto zero = parse_scenario(with_state("fermi", "adag(L,up)*adag(L,up)|vac>"));
  CHECK_THROWS_WITH_AS(evaluate_state(zero), doctest::Contains("non-normalizable"), Error);

  const auto fq = evaluate_state(parse_scenario(with_state("fermi", "A[ket(L,up) (x) ket(L,dn)]")));
  CHECK(std::abs(fq.raw_norm - 1.0 / std::sqrt(2.0)) < 1e-12);
  REQUIRE(fq.first_quantized.has_value());
  const ModeCatalog c({"L,up", "L,dn", "R,up", "R,dn"}, Statistics::Fermi);
  CHECK(distance(fq.state, apply_create(0, apply_create(1, vacuum(c)))) < 1e-12);

  const auto bose = evaluate_state(parse_scenario(with_state("bose", "S[ket(L,up) (x) ket(L,dn)]")));
  CHECK(std::abs(bose.raw_norm - 1.0 / std::sqrt(2.0)) < 1e-12);

  CHECK_THROWS_WITH_AS(evaluate_state(parse_scenario(with_state("bose", "ket(L,up) (x) ket(L,dn)"))),
                       doctest::Contains("S[...]"), Error);

  const auto complex = evaluate_state(parse_scenario(with_state("bose", "(1 + 2i)*adag(R,up)|vac>")));
  CHECK(std::abs(complex.raw_norm - std::sqrt(5.0)) < 1e-12);
  CHECK(std::abs(complex.state.amplitude(OccupationState({0, 0, 1, 0})) - Complex(1.0, 2.0) / std::sqrt(5.0)) < 1e-12);
}

TEST_CASE("operators and one-body matrices") {
  const ModeCatalog c({"a", "b"}, Statistics::Bose);
  const auto op = evaluate_operator(*parse_expr("2*adag(a)*a(b) + i*adag(b)*a(a)"), c);
  const Matrix m = one_body_matrix(op);
  CHECK(std::abs(m(0, 1) - 2.0) < 1e-12);
  CHECK(std::abs(m(1, 0) - Complex(0.0, 1.0)) < 1e-12);
  CHECK_THROWS_AS(one_body_matrix(evaluate_operator(*parse_expr("adag(a)"), c)), Error);
  CHECK_THROWS_AS(evaluate_operator(*parse_expr("adag(c)"), c), Error);
}

TEST_CASE("particle and subspace partitions") {
  const auto s = parse_scenario(with_state("bose", "sqrt(2)*S[ket(L,up) (x) ket(R,dn)]") +
                                "partition = particle adag(L,up)*a(L,up) | adag(R,dn)*a(R,dn)\n");
  const auto r = check_scenario(s);
  CHECK(r.probes_commute);
  CHECK(print_scenario(parse_scenario(print_scenario(s))) == print_scenario(s));

  const auto h = parse_scenario(with_state("fermi", "A[ket(L,up) (x) ket(L,dn)]") + "partition = subspace (L,up) (L,dn)\n");
  CHECK(std::abs(entropy_scenario(h) - std::log(2.0)) < kEntropyTolerance);
  CHECK_FALSE(classify_scenario(h, Definition::IV).separable);
}

TEST_CASE("sample scenario files") {
  const std::filesystem::path dir = std::filesystem::path(ENTWB_SOURCE_DIR) / "scenarios";
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".scn") continue;
    ++files;
    const auto s = load_scenario(entry.path().string());
    INFO(entry.path().string());
    CHECK(parse_scenario(print_scenario(s)) == s);
    for (const auto& c : run_expectations(s)) {
      INFO(c.quantity << " " << c.value << " vs " << c.expected);
      CHECK(c.pass);
    }
  }
  CHECK(files >= 5);
  CHECK_THROWS_AS(load_scenario((dir / "missing.scn").string()), Error);
}
