#include "entwb/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>


namespace entwb {

namespace {

std::string where(int line, int column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Columns count code points, not bytes.
int columns(std::string_view s, std::size_t bytes) {
  int n = 0;
  for (std::size_t i = 0; i < bytes && i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string strip_ws(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!is_space(c)) out.push_back(c);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

ExprPtr make(Expr::Kind k, std::vector<ExprPtr> args = {}, std::string label = {}, Complex value = {}) {
  return std::make_shared<const Expr>(Expr{k, value, std::move(label), std::move(args)});
}

class Parser {
 public:
  Parser(std::string_view text, int line, int column_offset) : s_(text), line_(line), offset_(column_offset) {}

  ExprPtr parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, line_, offset_ + columns(s_, at) + 1);
  }

  void skip() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }
  bool starts(std::string_view tok) {
    skip();
    return s_.substr(pos_, tok.size()) == tok;
  }
  bool eat(std::string_view tok) {
    if (!starts(tok)) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
  }

  ExprPtr expr() {
    auto e = term();
    for (;;) {
      if (eat("+")) {
        e = make(Expr::Kind::Add, {e, term()});
      } else if (eat("-")) {
        e = make(Expr::Kind::Sub, {e, term()});
      } else {
        return e;
      }
    }
  }

  ExprPtr term() {
    auto e = tensor();
    for (;;) {
      if (eat("*")) {
        e = make(Expr::Kind::Mul, {e, tensor()});
      } else if (eat("/")) {
        e = make(Expr::Kind::Div, {e, tensor()});
      } else if (eat("|vac>")) {
        e = make(Expr::Kind::Mul, {e, make(Expr::Kind::Vac)});
      } else {
        return e;
      }
    }
  }

  ExprPtr tensor() {
    auto e = unary();
    while (eat("(x)")) e = make(Expr::Kind::Tensor, {e, unary()});
    return e;
  }

  ExprPtr unary() {
    if (eat("-")) return make(Expr::Kind::Neg, {unary()});
    return primary();
  }

  std::string label() {
    expect("(");
    const std::size_t start = pos_;
    const std::size_t close = s_.find(')', pos_);
    if (close == std::string_view::npos) fail_at("missing ')'", s_.size());
    const auto inner = s_.substr(start, close - start);
    if (inner.find('(') != std::string_view::npos) fail_at("nested '(' in mode label", start);
    auto out = strip_ws(inner);
    if (out.empty()) fail_at("empty mode label", start);
    pos_ = close + 1;
    return out;
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != s_.data() + pos_) fail_at("malformed number", start);
    if (pos_ < s_.size() && s_[pos_] == 'i' && (pos_ + 1 >= s_.size() || !is_ident(s_[pos_ + 1]))) {
      ++pos_;
      return make(Expr::Kind::Number, {}, {}, Complex(0.0, v));
    }
    return make(Expr::Kind::Number, {}, {}, Complex(v, 0.0));
  }

  ExprPtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (eat("|vac>")) return make(Expr::Kind::Vac);
    if (c == '(') {
      ++pos_;
      auto e = expr();
      expect(")");
      return e;
    }
    if (!is_ident(c)) fail("unexpected '" + std::string(1, c) + "'");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident(s_[pos_])) ++pos_;
    const auto word = s_.substr(start, pos_ - start);
    if (word == "i") return make(Expr::Kind::Number, {}, {}, Complex(0.0, 1.0));
    if (word == "sqrt") {
      expect("(");
      auto e = expr();
      expect(")");
      return make(Expr::Kind::Sqrt, {e});
    }
    if (word == "adag") return make(Expr::Kind::Create, {}, label());
    if (word == "a") return make(Expr::Kind::Annihilate, {}, label());
    if (word == "ket") return make(Expr::Kind::Ket, {}, label());
    if (word == "S" || word == "A") {
      expect("[");
      auto e = expr();
      expect("]");
      return make(word == "S" ? Expr::Kind::Sym : Expr::Kind::Antisym, {e});
    }
    fail_at("unknown identifier '" + std::string(word) + "'", start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  int offset_;
};

int level(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Tensor:
      return 3;
    case Expr::Kind::Neg:
      return 4;
    case Expr::Kind::Number:
      return (e.value.real() < 0.0 || e.value.imag() < 0.0) ? 4 : 5;
    default:
      return 5;
  }
}

std::string format_double(double v) {
  // Shortest representation that reads back exactly.
  char buf[40];
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == v) break;
  }
  return buf;
}

std::string print_number(Complex v) {
  if (v.imag() == 0.0) return format_double(v.real());
  if (v.real() == 0.0) return format_double(v.imag()) + "i";
  return "(" + format_double(v.real()) + " + " + format_double(v.imag()) + "i)";
}

std::string child(const Expr& c, int p, bool right) {
  const int l = level(c);
  const bool paren = l < p || (right && l == p);
  const auto text = print_expr(c);
  return paren ? "(" + text + ")" : text;
}

}  // namespace

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(where(line, column) + message), line_(line), column_(column) {}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.value != b.value || a.label != b.label || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_expr(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

ExprPtr parse_expr(std::string_view text, int line, int column_offset) {
  return Parser(text, line, column_offset).parse();
}

std::string print_expr(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Number:
      return print_number(e.value);
    case K::Sqrt:
      return "sqrt(" + print_expr(*e.args[0]) + ")";
    case K::Add:
      return child(*e.args[0], 1, false) + " + " + child(*e.args[1], 1, true);
    case K::Sub:
      return child(*e.args[0], 1, false) + " - " + child(*e.args[1], 1, true);
    case K::Mul:
      if (e.args[1]->kind == K::Vac) return child(*e.args[0], 2, false) + "|vac>";
      return child(*e.args[0], 2, false) + "*" + child(*e.args[1], 2, true);
    case K::Div:
      return child(*e.args[0], 2, false) + "/" + child(*e.args[1], 2, true);
    case K::Tensor:
      return child(*e.args[0], 3, false) + " (x) " + child(*e.args[1], 3, true);
    case K::Neg:
      return "-" + child(*e.args[0], 4, false);
    case K::Create:
      return "adag(" + e.label + ")";
    case K::Annihilate:
      return "a(" + e.label + ")";
    case K::Ket:
      return "ket(" + e.label + ")";
    case K::Sym:
      return "S[" + print_expr(*e.args[0]) + "]";
    case K::Antisym:
      return "A[" + print_expr(*e.args[0]) + "]";
    case K::Vac:
      return "|vac>";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

const std::string kLabelSpecials = "()|,#=[]";

std::string print_label(const std::string& l) {
  const bool bare = l.find_first_of(kLabelSpecials) == std::string::npos;
  return bare ? l : "(" + l + ")";
}

std::string print_labels(const std::vector<std::string>& ls) {
  std::string out;
  for (const auto& l : ls) {
    if (!out.empty()) out += ' ';
    out += print_label(l);
  }
  return out;
}

struct Line {
  std::string_view text;
  int number;
};

class ScenarioReader {
 public:
  explicit ScenarioReader(Line line) : line_(line) {}

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, line_.number, columns(line_.text, at) + 1);
  }

  /// Offset of a subview of the line text.
  std::size_t offset(std::string_view part) const { return static_cast<std::size_t>(part.data() - line_.text.data()); }

  ExprPtr expr(std::string_view part) const {
    return parse_expr(part, line_.number, columns(line_.text, offset(part)));
  }

  /// `(L,up) (L,dn)` or `a b c`.
  std::vector<std::string> labels(std::string_view part) const {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < part.size()) {
      if (is_space(part[i])) {
        ++i;
        continue;
      }
      if (part[i] == '(') {
        const auto close = part.find(')', i);
        if (close == std::string_view::npos) fail("missing ')'", offset(part) + part.size());
        auto l = strip_ws(part.substr(i + 1, close - i - 1));
        if (l.empty() || l.find('(') != std::string::npos) fail("malformed mode label", offset(part) + i);
        out.push_back(std::move(l));
        i = close + 1;
        continue;
      }
      std::size_t j = i;
      while (j < part.size() && !is_space(part[j])) {
        if (kLabelSpecials.find(part[j]) != std::string::npos) fail("unexpected '" + std::string(1, part[j]) + "'", offset(part) + j);
        ++j;
      }
      out.emplace_back(part.substr(i, j - i));
      i = j;
    }
    return out;
  }

 private:
  Line line_;
};

/// Position of the top-level '|' outside parentheses.
std::size_t find_bar(std::string_view s) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '[') ++depth;
    if (s[i] == ')' || s[i] == ']') --depth;
    if (s[i] == '|' && depth == 0 && s.substr(i, 5) != "|vac>") return i;
  }
  return std::string_view::npos;
}

void collect_labels(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::Create || e.kind == Expr::Kind::Annihilate || e.kind == Expr::Kind::Ket) {
    out.push_back(e.label);
  }
  for (const auto& a : e.args) collect_labels(*a, out);
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) {
  auto same_partition = [](const std::optional<PartitionDecl>& x, const std::optional<PartitionDecl>& y) {
    if (!x || !y) return !x && !y;
    return x->kind == y->kind && x->left == y->left && x->right == y->right && same_expr(x->op1, y->op1) &&
           same_expr(x->op2, y->op2);
  };
  if (a.expectations.size() != b.expectations.size()) return false;
  for (std::size_t i = 0; i < a.expectations.size(); ++i) {
    if (a.expectations[i].quantity != b.expectations[i].quantity || a.expectations[i].value != b.expectations[i].value) {
      return false;
    }
  }
  return a.id == b.id && a.statistics == b.statistics && a.modes == b.modes && same_expr(a.state, b.state) &&
         a.definition == b.definition && same_partition(a.partition, b.partition) && same_expr(a.probe_a, b.probe_a) &&
         same_expr(a.probe_b, b.probe_b) && same_expr(a.probe_g, b.probe_g);
}

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::set<std::string> seen;
  int number = 0;
  bool have_stats = false;
  std::vector<std::pair<ExprPtr, Line>> exprs;
  std::vector<std::pair<std::vector<std::string>, Line>> label_lists;

  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const Line line{text.substr(start, end - start), ++number};
    start = end + 1;

    auto body = line.text;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    if (trim(body).empty()) continue;
    const ScenarioReader rd(line);

    const auto eq = body.find('=');
    if (eq == std::string_view::npos) rd.fail("expected 'key = value'", rd.offset(trim(body)));
    const auto key_view = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (value.empty()) rd.fail("missing value", rd.offset(body.substr(eq + 1)) + body.substr(eq + 1).size());
    std::istringstream ks{std::string(key_view)};
    std::vector<std::string> key;
    for (std::string w; ks >> w;) key.push_back(w);
    const auto key_at = rd.offset(key_view);

    const std::string key_name = key.empty() ? "" : key[0] + (key.size() > 1 ? " " + key[1] : "");
    if (key.empty() || key.size() > 2) rd.fail("malformed key", key_at);
    if (key[0] != "expect" && !seen.insert(key_name).second) rd.fail("duplicate key '" + key_name + "'", key_at);

    if (key.size() == 1 && key[0] == "id") {
      sc.id = std::string(value);
    } else if (key.size() == 1 && key[0] == "statistics") {
      if (value == "bose") {
        sc.statistics = Statistics::Bose;
      } else if (value == "fermi") {
        sc.statistics = Statistics::Fermi;
      } else {
        rd.fail("statistics must be bose or fermi", rd.offset(value));
      }
      have_stats = true;
    } else if (key.size() == 1 && key[0] == "modes") {
      sc.modes = rd.labels(value);
      label_lists.push_back({sc.modes, line});
    } else if (key.size() == 1 && key[0] == "state") {
      sc.state = rd.expr(value);
      exprs.push_back({sc.state, line});
    } else if (key.size() == 1 && key[0] == "definition") {
      try {
        sc.definition = parse_definition(value);
      } catch (const Error&) {
        rd.fail("definition must be one of I, II, III, IV, V", rd.offset(value));
      }
    } else if (key.size() == 1 && key[0] == "partition") {
      std::size_t w = 0;
      while (w < value.size() && !is_space(value[w])) ++w;
      const auto kind = value.substr(0, w);
      const auto rest = value.substr(w);
      PartitionDecl p{};
      const auto bar = find_bar(rest);
      const auto lhs = bar == std::string_view::npos ? rest : rest.substr(0, bar);
      const auto rhs = bar == std::string_view::npos ? std::string_view{} : rest.substr(bar + 1);
      if (kind == "modes" || kind == "sectors" || kind == "subspace") {
        p.kind = kind == "modes" ? PartitionDecl::Kind::Modes
                 : kind == "sectors" ? PartitionDecl::Kind::Sectors
                                     : PartitionDecl::Kind::Subspace;
        if (p.kind == PartitionDecl::Kind::Subspace && bar != std::string_view::npos) {
          rd.fail("subspace partition takes one label list", rd.offset(rest) + bar);
        }
        p.left = rd.labels(lhs);
        p.right = rd.labels(rhs);
        if (p.left.empty()) rd.fail("empty partition side", rd.offset(rest));
        label_lists.push_back({p.left, line});
        label_lists.push_back({p.right, line});
      } else if (kind == "particle") {
        p.kind = PartitionDecl::Kind::Particle;
        if (bar == std::string_view::npos) rd.fail("particle partition needs 'op | op'", rd.offset(value) + value.size());
        p.op1 = rd.expr(lhs);
        p.op2 = rd.expr(rhs);
        exprs.push_back({p.op1, line});
        exprs.push_back({p.op2, line});
      } else {
        rd.fail("partition kind must be modes, sectors, subspace or particle", rd.offset(value));
      }
      sc.partition = std::move(p);
    } else if (key.size() == 2 && key[0] == "probe" && (key[1] == "A" || key[1] == "B" || key[1] == "G")) {
      auto e = rd.expr(value);
      (key[1] == "A" ? sc.probe_a : key[1] == "B" ? sc.probe_b : sc.probe_g) = e;
      exprs.push_back({e, line});
    } else if (key.size() == 2 && key[0] == "expect") {
      static const std::set<std::string> kQuantities{"verdict", "gap", "qfi", "entropy"};
      if (!kQuantities.count(key[1])) rd.fail("unknown expectation '" + key[1] + "'", key_at);
      if (key[1] == "verdict") {
        if (value != "separable" && value != "entangled") rd.fail("verdict must be separable or entangled", rd.offset(value));
      } else {
        const auto e = rd.expr(value);
        try {
          const auto v = evaluate(*e, ModeCatalog({"_"}, Statistics::Bose));
          if (!std::holds_alternative<Complex>(v)) throw Error("not a number");
        } catch (const ParseError&) {
          throw;
        } catch (const Error&) {
          rd.fail("expected value must be a number", rd.offset(value));
        }
      }
      sc.expectations.push_back({key[1], std::string(value)});
    } else {
      rd.fail("unknown key '" + key_name + "'", key_at);
    }
  }

  const int last = std::max(number, 1);
  if (sc.id.empty()) throw ParseError("missing 'id'", last, 1);
  if (!have_stats) throw ParseError("missing 'statistics'", last, 1);
  if (sc.modes.empty()) throw ParseError("missing 'modes'", last, 1);
  if (!sc.state) throw ParseError("missing 'state'", last, 1);
  if (sc.definition && !sc.partition && *sc.definition >= Definition::III) {
    throw ParseError("definition " + std::string(to_string(*sc.definition)) + " needs a partition", last, 1);
  }

  try {
    ModeCatalog(sc.modes, sc.statistics);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), label_lists.front().second.number, 1);
  }
  const std::set<std::string> known(sc.modes.begin(), sc.modes.end());
  for (const auto& [ls, line] : label_lists) {
    for (const auto& l : ls) {
      if (!known.count(l)) {
        const auto at = line.text.find(l);
        throw ParseError("unknown mode label '" + l + "'", line.number,
                         at == std::string_view::npos ? 1 : columns(line.text, at) + 1);
      }
    }
  }
  for (const auto& [e, line] : exprs) {
    std::vector<std::string> ls;
    collect_labels(*e, ls);
    for (const auto& l : ls) {
      if (!known.count(l)) {
        const auto at = line.text.find(l);
        throw ParseError("unknown mode label '" + l + "'", line.number,
                         at == std::string_view::npos ? 1 : columns(line.text, at) + 1);
      }
    }
  }
  return sc;
}

std::string print_scenario(const Scenario& s) {
  std::string out;
  out += "id = " + s.id + "\n";
  out += "statistics = " + std::string(to_string(s.statistics)) + "\n";
  out += "modes = " + print_labels(s.modes) + "\n";
  out += "state = " + print_expr(*s.state) + "\n";
  if (s.definition) out += "definition = " + std::string(to_string(*s.definition)) + "\n";
  if (s.partition) {
    const auto& p = *s.partition;
    switch (p.kind) {
      case PartitionDecl::Kind::Modes:
      case PartitionDecl::Kind::Sectors:
        out += std::string("partition = ") + (p.kind == PartitionDecl::Kind::Modes ? "modes " : "sectors ") +
               print_labels(p.left);
        if (!p.right.empty()) out += " | " + print_labels(p.right);
        out += "\n";
        break;
      case PartitionDecl::Kind::Subspace:
        out += "partition = subspace " + print_labels(p.left) + "\n";
        break;
      case PartitionDecl::Kind::Particle:
        out += "partition = particle " + print_expr(*p.op1) + " | " + print_expr(*p.op2) + "\n";
        break;
    }
  }
  if (s.probe_a) out += "probe A = " + print_expr(*s.probe_a) + "\n";
  if (s.probe_b) out += "probe B = " + print_expr(*s.probe_b) + "\n";
  if (s.probe_g) out += "probe G = " + print_expr(*s.probe_g) + "\n";
  for (const auto& e : s.expectations) out += "expect " + e.quantity + " = " + e.value + "\n";
  return out;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

const char* kind_name(const Value& v) {
  switch (v.index()) {
    case 0:
      return "number";
    case 1:
      return "operator";
    case 2:
      return "Fock state";
    default:
      return "first-quantized state";
  }
}

[[noreturn]] void type_error(const char* op, const Value& a, const Value& b) {
  throw Error(std::string("cannot ") + op + " " + kind_name(a) + " and " + kind_name(b));
}

Value scale(Complex c, const Value& v) {
  return std::visit([c](const auto& x) -> Value { return c * x; }, v);
}

Value add(const Value& a, const Value& b, const ModeCatalog& catalog, double sign) {
  const Complex s = sign;
  if (const auto* x = std::get_if<Complex>(&a)) {
    if (const auto* y = std::get_if<Complex>(&b)) return *x + s * *y;
    if (const auto* y = std::get_if<OperatorExpr>(&b)) return OperatorExpr::scalar(catalog, *x) + s * *y;
  }
  if (const auto* x = std::get_if<OperatorExpr>(&a)) {
    if (const auto* y = std::get_if<OperatorExpr>(&b)) return *x + s * *y;
    if (const auto* y = std::get_if<Complex>(&b)) return *x + OperatorExpr::scalar(catalog, s * *y);
  }
  if (const auto* x = std::get_if<StateVector>(&a)) {
    if (const auto* y = std::get_if<StateVector>(&b)) return *x + s * *y;
  }
  if (const auto* x = std::get_if<FirstQTensor>(&a)) {
    if (const auto* y = std::get_if<FirstQTensor>(&b)) {
      if (x->particles() != y->particles()) throw Error("cannot add tensors with different particle numbers");
      const FirstQTensor ux(x->dim(), x->particles(), x->amps());
      const FirstQTensor uy(y->dim(), y->particles(), y->amps());
      return ux + s * uy;
    }
  }
  type_error(sign > 0 ? "add" : "subtract", a, b);
}

Value mul(const Value& a, const Value& b) {
  if (const auto* x = std::get_if<Complex>(&a)) return scale(*x, b);
  if (const auto* y = std::get_if<Complex>(&b)) return scale(*y, a);
  if (const auto* x = std::get_if<OperatorExpr>(&a)) {
    if (const auto* y = std::get_if<OperatorExpr>(&b)) return *x * *y;
    if (const auto* y = std::get_if<StateVector>(&b)) return apply(*x, *y);
  }
  type_error("multiply", a, b);
}

Complex as_scalar(const Value& v, const char* what) {
  if (const auto* x = std::get_if<Complex>(&v)) return *x;
  throw Error(std::string(what) + " needs a number, got " + kind_name(v));
}

FirstQTensor as_tensor(const Value& v, const char* what) {
  if (const auto* x = std::get_if<FirstQTensor>(&v)) return *x;
  throw Error(std::string(what) + " needs a first-quantized state, got " + kind_name(v));
}

}  // namespace

Value evaluate(const Expr& e, const ModeCatalog& catalog) {
  using K = Expr::Kind;
  auto arg = [&](std::size_t i) { return evaluate(*e.args[i], catalog); };
  switch (e.kind) {
    case K::Number:
      return e.value;
    case K::Sqrt:
      return std::sqrt(as_scalar(arg(0), "sqrt"));
    case K::Add:
      return add(arg(0), arg(1), catalog, 1.0);
    case K::Sub:
      return add(arg(0), arg(1), catalog, -1.0);
    case K::Mul:
      return mul(arg(0), arg(1));
    case K::Div: {
      const Complex d = as_scalar(arg(1), "division");
      if (std::abs(d) < kDropTolerance) throw Error("division by zero");
      return scale(1.0 / d, arg(0));
    }
    case K::Tensor:
      return tensor(as_tensor(arg(0), "(x)"), as_tensor(arg(1), "(x)"));
    case K::Neg:
      return scale(-1.0, arg(0));
    case K::Create:
      return OperatorExpr::create(catalog, static_cast<int>(catalog.index_of(e.label)));
    case K::Annihilate:
      return OperatorExpr::annihilate(catalog, static_cast<int>(catalog.index_of(e.label)));
    case K::Ket: {
      const int d = static_cast<int>(catalog.size());
      return FirstQTensor::basis_product(d, {static_cast<int>(catalog.index_of(e.label))});
    }
    case K::Sym:
      return symmetrize(as_tensor(arg(0), "S[...]"), Statistics::Bose);
    case K::Antisym:
      return symmetrize(as_tensor(arg(0), "A[...]"), Statistics::Fermi);
    case K::Vac:
      return vacuum(catalog);
  }
  throw Error("unhandled expression");
}

OperatorExpr evaluate_operator(const Expr& e, const ModeCatalog& catalog) {
  const auto v = evaluate(e, catalog);
  if (const auto* c = std::get_if<Complex>(&v)) return OperatorExpr::scalar(catalog, *c);
  if (const auto* o = std::get_if<OperatorExpr>(&v)) return *o;
  throw Error(std::string("expected an operator, got ") + kind_name(v));
}

Matrix one_body_matrix(const OperatorExpr& op) {
  const auto d = static_cast<Eigen::Index>(op.catalog().size());
  Matrix m = Matrix::Zero(d, d);
  for (const auto& [mono, c] : op.terms()) {
    if (mono.creators.size() != 1 || mono.annihilators.size() != 1) {
      throw Error("not a one-body operator: " + op.to_string());
    }
    m(mono.creators[0], mono.annihilators[0]) += c;
  }
  return m;
}

ModeCatalog scenario_catalog(const Scenario& s) { return ModeCatalog(s.modes, s.statistics); }

ScenarioState evaluate_state(const Scenario& s) {
  const auto catalog = scenario_catalog(s);
  const auto v = evaluate(*s.state, catalog);
  if (const auto* f = std::get_if<StateVector>(&v)) {
    const double n = f->norm();
    if (n < kDropTolerance) throw Error("non-normalizable zero state");
    return ScenarioState{f->normalized(), std::nullopt, n};
  }
  if (const auto* t = std::get_if<FirstQTensor>(&v)) {
    const double n = t->norm();
    if (n < kDropTolerance) throw Error("non-normalizable zero state");
    const FirstQTensor u = t->normalized();
    if (!u.has_symmetry(tag_for(s.statistics))) {
      throw Error(std::string("first-quantized state lacks ") +
                  (s.statistics == Statistics::Bose ? "exchange symmetry; wrap it in S[...]"
                                                    : "exchange antisymmetry; wrap it in A[...]"));
    }
    const FirstQTensor tagged(u.dim(), u.particles(), u.amps(), tag_for(s.statistics));
    return ScenarioState{to_fock(tagged, catalog), tagged, n};
  }
  throw Error(std::string("state must be a Fock or first-quantized state, got ") + kind_name(v));
}

namespace {

struct Sides {
  std::vector<int> left;
  std::vector<int> right;
};

Sides partition_sides(const Scenario& s, const ModeCatalog& catalog) {
  if (!s.partition || s.partition->kind == PartitionDecl::Kind::Particle) {
    throw Error("this operation needs a modes, sectors or subspace partition");
  }
  Sides out;
  std::vector<bool> used(catalog.size(), false);
  for (const auto& l : s.partition->left) {
    const auto i = catalog.index_of(l);
    out.left.push_back(static_cast<int>(i));
    used[i] = true;
  }
  if (s.partition->right.empty()) {
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      if (!used[i]) out.right.push_back(static_cast<int>(i));
    }
  } else {
    for (const auto& l : s.partition->right) out.right.push_back(static_cast<int>(catalog.index_of(l)));
  }
  return out;
}

Matrix columns_for(const std::vector<int>& modes, std::size_t d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) m(modes[k], static_cast<Eigen::Index>(k)) = 1.0;
  return m;
}

}  // namespace

Verdict classify_scenario(const Scenario& s, Definition d) {
  const auto st = evaluate_state(s);
  const auto& catalog = st.state.catalog();
  switch (d) {
    case Definition::I:
      return is_separable_I(st.state);
    case Definition::II:
      return is_separable_II(st.state);
    case Definition::III: {
      const auto sides = partition_sides(s, catalog);
      const auto split =
          make_sector_local(columns_for(sides.left, catalog.size()), columns_for(sides.right, catalog.size()));
      return is_separable_III(st.state, split);
    }
    case Definition::IV: {
      const auto sides = partition_sides(s, catalog);
      return is_entangled_IV(st.state, columns_for(sides.left, catalog.size()));
    }
    case Definition::V: {
      const auto sides = partition_sides(s, catalog);
      return is_separable_V(st.state, make_mode_bipartition(sides.left, sides.right, catalog.size()));
    }
  }
  throw Error("unhandled definition");
}

FactorizationReport check_scenario(const Scenario& s) {
  const auto st = evaluate_state(s);
  const auto& catalog = st.state.catalog();
  ExprPtr ea = s.probe_a;
  ExprPtr eb = s.probe_b;
  const bool particle = s.partition && s.partition->kind == PartitionDecl::Kind::Particle;
  if (particle) {
    if (!ea) ea = s.partition->op1;
    if (!eb) eb = s.partition->op2;
    make_particle_local_pair(one_body_matrix(evaluate_operator(*s.partition->op1, catalog)),
                             one_body_matrix(evaluate_operator(*s.partition->op2, catalog)));
  }
  if (!ea || !eb) throw Error("factorization check needs probe A and probe B");
  const auto a = evaluate_operator(*ea, catalog);
  const auto b = evaluate_operator(*eb, catalog);
  if (s.partition && s.partition->kind == PartitionDecl::Kind::Modes) {
    const auto sides = partition_sides(s, catalog);
    auto inside = [](const OperatorExpr& op, const std::vector<int>& side) {
      const auto m = op.modes();
      return std::all_of(m.begin(), m.end(),
                         [&](int i) { return std::find(side.begin(), side.end(), i) != side.end(); });
    };
    if (!inside(a, sides.left)) throw Error("probe A acts outside the left modes");
    if (!inside(b, sides.right)) throw Error("probe B acts outside the right modes");
  }
  return factorization_gap(st.state, a, b);
}

double qfi_scenario(const Scenario& s) {
  if (!s.probe_g) throw Error("QFI needs probe G");
  const auto st = evaluate_state(s);
  return qfi_phase(st.state, evaluate_operator(*s.probe_g, st.state.catalog()));
}

double entropy_scenario(const Scenario& s) {
  const auto st = evaluate_state(s);
  const auto& catalog = st.state.catalog();
  const auto sides = partition_sides(s, catalog);
  return reduced_X1(st.state, columns_for(sides.left, catalog.size())).entropy;
}

std::vector<ScenarioCheck> run_expectations(const Scenario& s) {
  std::vector<ScenarioCheck> out;
  for (const auto& e : s.expectations) {
    if (e.quantity == "verdict") {
      if (!s.definition) throw Error("expect verdict needs a definition");
      const auto v = classify_scenario(s, *s.definition);
      const std::string got = v.separable ? "separable" : "entangled";
      out.push_back({e.quantity, got, e.value, v.tolerance, got == e.value});
      continue;
    }
    const Complex want = std::get<Complex>(evaluate(*parse_expr(e.value), scenario_catalog(s)));
    Complex got;
    double tol = kTolerance;
    if (e.quantity == "gap") {
      got = check_scenario(s).gap;
    } else if (e.quantity == "qfi") {
      got = qfi_scenario(s);
    } else {
      got = entropy_scenario(s);
      tol = kEntropyTolerance;
    }
    char gv[64];
    char wv[64];
    std::snprintf(gv, sizeof gv, "%.9f", got.real());
    std::snprintf(wv, sizeof wv, "%.9f", want.real());
    out.push_back({e.quantity, gv, wv, tol, std::abs(got - want) <= tol});
  }
  return out;
}

}  // namespace entwb
