#pragma once

// Fixed corpus of worked examples, the verdict table built from their
// findings, and the report emitters.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "entwb/classify.hpp"

namespace entwb {

struct Check {
  enum class Relation { Equal, Greater };

  std::string quantity;
  double value;
  double expected;
  double tolerance;
  Relation relation = Relation::Equal;
  int decimals = 9;

  bool pass() const;
};

enum class Criterion { Locality, EffectiveDistinguishability, Resources };

std::string_view to_string(Criterion c);

/// One piece of evidence for a table cell: whether the definition behaved
/// consistently with the criterion in this scenario.
struct Finding {
  Definition definition;
  Criterion criterion;
  bool complies;
};

struct ScenarioResult {
  std::string id;
  std::vector<Check> checks;
  std::vector<Finding> findings;
  /// Set when the scenario threw; counts as a failure.
  std::string error;

  bool passed() const;
};

struct ReproConfig {
  std::uint64_t seed = 1234;
  /// Random probe pairs per mode-sweep state.
  int probes = 100;
};

struct ReproReport {
  ReproConfig config;
  std::vector<ScenarioResult> scenarios;

  bool passed() const;
  const ScenarioResult* find(const std::string& id) const;
};

/// Runs every scenario; results are ordered by id.
ReproReport run_repro_suite(const ReproConfig& config = {});

std::string report_csv(const ReproReport& r);
std::string report_markdown(const ReproReport& r);

enum class Cell { Pass, Fail, Open };

struct VerdictTable {
  struct Entry {
    Cell cell = Cell::Open;
    std::vector<std::string> scenarios;
  };
  /// Rows I..V, columns locality, effective distinguishability, resources.
  std::array<std::array<Entry, 3>, 5> cells;
};

/// A cell fails if any finding does not comply, passes if all comply, and is
/// open without findings. Throws if a backing scenario failed.
VerdictTable generate_table1(const ReproReport& r);
std::string_view glyph(Cell c);
std::string table_markdown(const VerdictTable& t);
std::string table_csv(const VerdictTable& t);

}  // namespace entwb
