#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entwb/correlations.hpp"
#include "entwb/repro.hpp"
#include "entwb/scenario.hpp"

namespace {

using namespace entwb;

/// --seed beats ENTWB_SEED beats the default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ENTWB_SEED"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw Error(std::string("ENTWB_SEED is not an unsigned integer: ") + env);
    return v;
  }
  return 1234;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", std::abs(v) < 5e-13 ? 0.0 : v);
  return buf;
}

std::string cnum(Complex z) {
  if (std::abs(z.imag()) < 5e-13) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "i";
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

int cmd_classify(const std::string& file, const std::string& definition, bool brute_force) {
  const auto sc = load_scenario(file);
  Definition d;
  if (!definition.empty()) {
    d = parse_definition(definition);
  } else if (sc.definition) {
    d = *sc.definition;
  } else {
    throw Error("no definition given and none in the scenario");
  }
  Verdict v = [&] {
    if (d == Definition::II && brute_force) {
      SeparableIIOptions opt;
      opt.brute_force = true;
      return is_separable_II(evaluate_state(sc).state, opt);
    }
    return classify_scenario(sc, d);
  }();
  std::cout << sc.id << ": " << v.summary() << "\n";
  return 0;
}

int cmd_check(const std::string& file) {
  const auto sc = load_scenario(file);
  const auto r = check_scenario(sc);
  if (!r.probes_commute) std::cerr << "warning: probes do not commute on this state's sectors\n";
  std::cout << "scenario " << sc.id << "\n"
            << "lhs " << cnum(r.lhs) << "\n"
            << "rhs " << cnum(r.rhs) << "\n"
            << "gap " << cnum(r.gap) << "\n"
            << "factorizes " << (r.factorizes ? "true" : "false") << "\n";
  return 0;
}

int cmd_qfi(const std::string& file) {
  const auto sc = load_scenario(file);
  std::cout << sc.id << ": qfi " << num(qfi_scenario(sc)) << "\n";
  return 0;
}

int cmd_verify(const std::vector<std::string>& files) {
  int failed = 0;
  for (const auto& f : files) {
    const auto sc = load_scenario(f);
    for (const auto& c : run_expectations(sc)) {
      std::cout << sc.id << "," << c.quantity << "," << c.value << "," << c.expected << ","
                << (c.pass ? "pass" : "fail") << "\n";
      failed += c.pass ? 0 : 1;
    }
  }
  return failed == 0 ? 0 : 1;
}

int cmd_repro(const std::string& format, std::optional<std::uint64_t> seed, const std::string& output) {
  ReproConfig config;
  config.seed = resolve_seed(seed);
  const auto report = run_repro_suite(config);
  emit(format == "md" ? report_markdown(report) : report_csv(report), output);
  return report.passed() ? 0 : 1;
}

int cmd_table1(const std::string& format, std::optional<std::uint64_t> seed) {
  ReproConfig config;
  config.seed = resolve_seed(seed);
  const auto table = generate_table1(run_repro_suite(config));
  std::cout << (format == "csv" ? table_csv(table) : table_markdown(table));
  return 0;
}

int cmd_props(std::optional<std::uint64_t> seed_flag, int samples) {
  const auto seed = resolve_seed(seed_flag);
  Rng rng(seed);
  std::cout << "property,samples,seed,max_residual,status\n";
  auto line = [&](const char* name, double residual, double tol) {
    std::cout << name << "," << samples << "," << seed << "," << num(residual) << ","
              << (residual < tol ? "pass" : "fail") << "\n";
    return residual < tol;
  };
  bool ok = true;

  double ccr = 0.0;
  double ordering = 0.0;
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const ModeCatalog c({"0", "1", "2", "3"}, s);
    const double eta = s == Statistics::Bose ? 1.0 : -1.0;
    std::uniform_int_distribution<int> mode(0, 3);
    std::uniform_int_distribution<int> count(0, 3);
    for (int k = 0; k < samples; ++k) {
      const int i = mode(rng);
      const int j = mode(rng);
      const auto st = random_sector_state(c, count(rng), rng);
      const auto lhs = apply_annihilate(static_cast<std::size_t>(i), apply_create(static_cast<std::size_t>(j), st));
      const auto rhs = Complex(eta) * apply_create(static_cast<std::size_t>(j), apply_annihilate(static_cast<std::size_t>(i), st));
      const auto delta = i == j ? st : StateVector(c);
      ccr = std::max(ccr, distance(lhs - rhs, delta));

      const auto a = random_mode_local_probe(c, {0, 1, 2, 3}, rng);
      const auto b = random_mode_local_probe(c, {0, 1, 2, 3}, rng);
      ordering = std::max(ordering, distance(apply(a * b, st), apply(a, apply(b, st))));
    }
  }
  ok = line("ccr_car", ccr, 1e-10) && ok;
  ok = line("normal_ordering", ordering, kTolerance) && ok;

  double sweep = 0.0;
  const ModeCatalog c({"L,up", "L,dn", "R,up", "R,dn"}, Statistics::Bose);
  const auto bip = make_mode_bipartition({0, 1}, {2, 3}, 4);
  for (int k = 0; k < std::max(1, samples / 100); ++k) {
    const auto st = random_product_state(c, bip, 1, 1, rng);
    sweep = std::max(sweep, probe_sweep(st, bip, ProbeSweepConfig{100, rng()}).max_gap);
  }
  ok = line("separable_V_zero_gap", sweep, kEntropyTolerance) && ok;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement workbench for identical particles"};
  app.require_subcommand(1);

  std::string file;
  std::string definition;
  bool brute_force = false;
  auto* classify = app.add_subcommand("classify", "Classify the scenario state under one definition");
  classify->add_option("--scenario", file, "Scenario file")->required();
  classify->add_option("--definition", definition, "I, II, III, IV or V");
  classify->add_flag("--brute-force", brute_force, "Search for separable-II states with N > 2");

  auto* check = app.add_subcommand("check", "Factorization gap <AB> - <A><B> for the scenario probes");
  check->add_option("--scenario", file, "Scenario file")->required();

  auto* qfi = app.add_subcommand("qfi", "Quantum Fisher information 4 Var(G) for probe G");
  qfi->add_option("--scenario", file, "Scenario file")->required();

  std::vector<std::string> files;
  auto* verify = app.add_subcommand("verify", "Evaluate the expect lines of scenario files");
  verify->add_option("files", files, "Scenario files")->required();

  std::string format = "csv";
  std::string output;
  std::optional<std::uint64_t> seed;
  auto* repro = app.add_subcommand("repro", "Run the reproduction corpus");
  repro->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  repro->add_option("--seed", seed, "Random seed (default ENTWB_SEED or 1234)");
  repro->add_option("--output", output, "Write the report here instead of stdout");

  std::string table_format = "md";
  auto* table1 = app.add_subcommand("table1", "Print the verdict table derived from the corpus");
  table1->add_option("--format", table_format, "md or csv")->check(CLI::IsMember({"csv", "md"}));
  table1->add_option("--seed", seed, "Random seed (default ENTWB_SEED or 1234)");

  int samples = 1000;
  auto* props = app.add_subcommand("props", "Randomized property sweeps");
  props->add_option("--seed", seed, "Random seed (default ENTWB_SEED or 1234)");
  props->add_option("--samples", samples, "Samples per property")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return cmd_classify(file, definition, brute_force);
    if (*check) return cmd_check(file);
    if (*qfi) return cmd_qfi(file);
    if (*verify) return cmd_verify(files);
    if (*repro) return cmd_repro(format, seed, output);
    if (*table1) return cmd_table1(table_format, seed);
    if (*props) return cmd_props(seed, samples);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
