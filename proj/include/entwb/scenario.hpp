#pragma once

// Plain-text scenario descriptions.
//
//   id = bell-like
//   statistics = fermi
//   modes = (L,up) (L,dn) (R,up) (R,dn)
//   state = (adag(L,up)*adag(R,dn) + adag(L,dn)*adag(R,up))|vac>
//   definition = V
//   partition = modes (L,up) (L,dn) | (R,up) (R,dn)
//   probe A = adag(L,up)*a(L,up)
//   probe B = adag(R,dn)*a(R,dn)
//   expect verdict = entangled
//   expect gap = 0.25
//
// Partition forms: `modes A.. | B..`, `sectors A.. | B..`, `subspace A..`,
// `particle <one-body op> | <one-body op>`. States may also be written in
// first quantization with ket(label), (x), S[..] and A[..].

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "entwb/algebra.hpp"
#include "entwb/classify.hpp"
#include "entwb/correlations.hpp"
#include "entwb/firstq.hpp"
#include "entwb/fock.hpp"

namespace entwb {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Sqrt, Add, Sub, Mul, Div, Tensor, Neg, Create, Annihilate, Ket, Sym, Antisym, Vac };
  Kind kind;
  Complex value{};
  std::string label;
  std::vector<ExprPtr> args;
};

bool operator==(const Expr& a, const Expr& b);
bool same_expr(const ExprPtr& a, const ExprPtr& b);

/// Parses an expression; line is used for error positions.
ExprPtr parse_expr(std::string_view text, int line = 1, int column_offset = 0);
/// Canonical text with minimal parentheses; parse_expr(print_expr(e)) == e.
std::string print_expr(const Expr& e);

struct PartitionDecl {
  enum class Kind { Modes, Sectors, Subspace, Particle };
  Kind kind;
  std::vector<std::string> left;
  std::vector<std::string> right;
  ExprPtr op1;
  ExprPtr op2;
};

struct ScenarioExpectation {
  std::string quantity;  // verdict, gap, qfi or entropy
  std::string value;
};

struct Scenario {
  std::string id;
  Statistics statistics = Statistics::Bose;
  std::vector<std::string> modes;
  ExprPtr state;
  std::optional<Definition> definition;
  std::optional<PartitionDecl> partition;
  ExprPtr probe_a;
  ExprPtr probe_b;
  ExprPtr probe_g;
  std::vector<ScenarioExpectation> expectations;
};

bool operator==(const Scenario& a, const Scenario& b);

Scenario parse_scenario(std::string_view text);
std::string print_scenario(const Scenario& s);
Scenario load_scenario(const std::string& path);

using Value = std::variant<Complex, OperatorExpr, StateVector, FirstQTensor>;
Value evaluate(const Expr& e, const ModeCatalog& catalog);
OperatorExpr evaluate_operator(const Expr& e, const ModeCatalog& catalog);

/// One-body operator Σ O(i,j) a†_i a_j back to its matrix; throws otherwise.
Matrix one_body_matrix(const OperatorExpr& op);

struct ScenarioState {
  StateVector state;
  /// Present when the state was written in first quantization.
  std::optional<FirstQTensor> first_quantized;
  /// Norm of the expression before auto-normalization.
  double raw_norm;
};

ModeCatalog scenario_catalog(const Scenario& s);
ScenarioState evaluate_state(const Scenario& s);

struct ScenarioCheck {
  std::string quantity;
  std::string value;
  std::string expected;
  double tolerance;
  bool pass;
};

Verdict classify_scenario(const Scenario& s, Definition d);
FactorizationReport check_scenario(const Scenario& s);
double qfi_scenario(const Scenario& s);
double entropy_scenario(const Scenario& s);
/// Evaluates every `expect` line.
std::vector<ScenarioCheck> run_expectations(const Scenario& s);

}  // namespace entwb
