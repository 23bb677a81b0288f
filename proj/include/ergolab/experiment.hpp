#pragma once

// JSON-configured batch experiments, run records, and CSV I/O.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ergolab/classify.hpp"
#include "ergolab/complex_seq.hpp"
#include "ergolab/correlation.hpp"
#include "ergolab/reduce.hpp"
#include "ergolab/sequences.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Experiment kinds accepted by run_experiment.
const std::vector<std::string>& experiment_kinds();

struct ScalarResult {
  std::string name;
  double value = 0.0;
  json params = json::object();
  std::uint64_t seed = 0;
};

struct RunRecord {
  json config;
  std::vector<ScalarResult> results;
  std::vector<std::string> artifacts;
  double wall_time = 0.0;
  std::string version = kVersion;

  json to_json() const;
  static RunRecord from_json(const json& j);
};

/// Columns of doubles with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct RunOutput {
  RunRecord record;
  /// File stem -> table, written as <stem>.csv.
  std::vector<std::pair<std::string, Table>> tables;
  /// Extra JSON documents, written as <stem>.json.
  std::vector<std::pair<std::string, json>> documents;
};

// ---------------------------------------------------------------------------
// Descriptors. All throw ConfigError on schema violations.

/// A number, "golden", "-golden", or {"u64": ..., "decimal": ...}.
CirclePoint parse_circle_point(const json& j);
json circle_point_json(CirclePoint p);
Complex parse_complex(const json& j);

/// Bernoulli factors draw seeds from `seed` keyed by their position in the
/// descriptor tree, e.g. "system.left".
MPSystem parse_system(const json& j, std::uint64_t seed, const std::string& path = "system");
Observable parse_observable(const json& j, const MPSystem& sys);
MeasurableSet parse_set(const json& j, const MPSystem& sys);
ComplexSeq parse_sequence(const json& j, std::uint64_t seed, const std::string& path);
BlockSpec parse_block_spec(const json& j);
TrigPolynomial parse_trig_polynomial(const json& j);
/// Greedy schedules are built against x.
SubsequenceSchedule parse_schedule(const json& j, const ComplexSeq* x);

/// Seed used for a Bernoulli factor at `path`.
std::uint64_t component_seed(std::uint64_t seed, const std::string& path);

// ---------------------------------------------------------------------------

RunOutput run_experiment(const json& config, Parallelism par = {});

/// Writes <dir>/record.json plus every table and document, filling in
/// record.artifacts.
void write_outputs(RunOutput& out, const std::filesystem::path& dir);

/// Re-runs rec.config and compares every scalar bit for bit. On mismatch,
/// `diff` receives one line per differing result.
bool replay_matches(const RunRecord& rec, Parallelism par, std::string* diff = nullptr);

/// Scientific notation, 17 significant digits.
std::string format_number(double v);
void write_csv(std::ostream& os, const Table& t);
void write_csv(const std::filesystem::path& path, const Table& t);
Table read_csv(std::istream& is);
Table read_csv(const std::filesystem::path& path);

/// Columns n, re, im for n = first .. first + N - 1 of the config's sequence.
Table dump_sequence(const json& config, Parallelism par = {});

// ---------------------------------------------------------------------------

struct LemmaReport {
  bool pass = false;
  std::vector<std::string> lines;
};

const std::vector<std::string>& lemma_names();
/// Throws ConfigError for unknown names.
LemmaReport verify_lemma(const std::string& name, Parallelism par = {});

}  // namespace ergolab
