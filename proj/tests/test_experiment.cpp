#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ergolab/errors.hpp"
#include "ergolab/experiment.hpp"

using namespace ergolab;
namespace fs = std::filesystem;

namespace {

const fs::path kTestDir = ERGOLAB_TEST_DIR;

json load(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is);
  return json::parse(is);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ergolab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

json base_birkhoff() {
  return {{"kind", "birkhoff"},
          {"seed", 5},
          {"system", {{"type", "bernoulli"}, {"probs", {0.5, 0.5}}}},
          {"observable", {{"type", "cylinder"}, {"window", 4}, {"generator", "doubling_cos"}, {"centered", true}}},
          {"N", 5000}};
}

}  // namespace

TEST_CASE("golden records replay bit for bit", "[experiment][golden]") {
  for (const std::string& kind : experiment_kinds()) {
    INFO(kind);
    const json golden = load(kTestDir / "golden" / (kind + ".json"));
    const RunRecord rec = RunRecord::from_json(golden);
    CHECK(rec.config == load(kTestDir / "configs" / (kind + ".json")));
    CHECK(rec.config.at("kind") == kind);
    REQUIRE_FALSE(rec.results.empty());
    std::string diff;
    CHECK(replay_matches(rec, Parallelism{1}, &diff));
    CHECK(diff.empty());
    CHECK(replay_matches(rec, Parallelism{4}));
  }
}

TEST_CASE("replay detects a changed scalar", "[experiment]") {
  RunRecord rec = run_experiment(base_birkhoff()).record;
  REQUIRE(replay_matches(rec, {}));
  rec.results[0].value = std::nextafter(rec.results[0].value, 1.0);
  std::string diff;
  CHECK_FALSE(replay_matches(rec, {}, &diff));
  CHECK(diff.find("cesaro_average_re") != std::string::npos);
}

TEST_CASE("run records round-trip through JSON", "[experiment]") {
  const RunOutput out = run_experiment(load(kTestDir / "configs" / "block-sequence.json"));
  const json j = json::parse(out.record.to_json().dump());
  const RunRecord back = RunRecord::from_json(j);
  REQUIRE(back.results.size() == out.record.results.size());
  for (std::size_t i = 0; i < back.results.size(); ++i) {
    CHECK(back.results[i].name == out.record.results[i].name);
    CHECK(same_bits(back.results[i].value, out.record.results[i].value));
    CHECK(back.results[i].params == out.record.results[i].params);
    CHECK(back.results[i].seed == 16);
  }
  CHECK(back.version == kVersion);
  CHECK(back.config == out.record.config);
}

TEST_CASE("schema errors", "[experiment]") {
  json c = base_birkhoff();
  c.erase("seed");
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  c = base_birkhoff();
  c["colour"] = "red";
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  c = base_birkhoff();
  c["kind"] = "ergodic-decomposition";
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  c = base_birkhoff();
  c["seed"] = -3;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  c = base_birkhoff();
  c["observable"]["flavour"] = 1;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  c = base_birkhoff();
  c.erase("N");
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  CHECK_THROWS_AS(parse_circle_point("silver"), ConfigError);
  CHECK_THROWS_AS(parse_circle_point(json{{"u64", "-1"}}), ConfigError);
  CHECK(parse_circle_point(json{{"u64", "0x8000000000000000"}}).frac == std::uint64_t{1} << 63);
  CHECK(parse_circle_point("golden") == kGoldenRotation);
  CHECK(parse_complex(json::array({1.5, -2})) == Complex(1.5, -2.0));
  CHECK_THROWS_AS(parse_schedule(json{{"type", "fibonacci"}}, nullptr), ConfigError);
  CHECK_THROWS_AS(parse_schedule(json{{"type", "explicit"}, {"horizons", {5, 3}}}, nullptr), DomainError);
}

TEST_CASE("incompatible and numeric-guard errors", "[experiment]") {
  json c = base_birkhoff();
  c["system"] = {{"type", "rotation"}, {"alpha", "golden"}};
  CHECK_THROWS_AS(run_experiment(c), IncompatibleError);

  const json poly = {{"kind", "polynomial-average"},
                     {"seed", 1},
                     {"system", {{"type", "rotation"}, {"alpha", 0.1}}},
                     {"observable", {{"type", "exp"}}},
                     {"polynomial", {-50, 1}},
                     {"N", 100}};
  CHECK_THROWS_AS(run_experiment(poly), NumericGuardError);

  const json greedy = {{"kind", "adversarial"},
                       {"seed", 1},
                       {"sequence", {{"type", "constant"}}},
                       {"schedule", {{"type", "greedy"}, {"k_max", 12}, {"N_probe", 100000}}},
                       {"m_max", 2},
                       {"h_max", 2}};
  CHECK_THROWS_AS(run_experiment(greedy), ProbeExhausted);
}

TEST_CASE("component seeds are derived per path", "[experiment]") {
  CHECK(component_seed(1, "system") == component_seed(1, "system"));
  CHECK(component_seed(1, "system") != component_seed(2, "system"));
  CHECK(component_seed(1, "system.left") != component_seed(1, "system.right"));
  const json prod = {{"type", "product"},
                     {"left", {{"type", "bernoulli"}, {"probs", {0.5, 0.5}}}},
                     {"right", {{"type", "bernoulli"}, {"probs", {0.5, 0.5}}}}};
  const MPSystem sys = parse_system(prod, 9);
  const auto& prod_sys = std::get<ProductSystem>(sys.kind);
  const auto& left = std::get<BernoulliSystem>(prod_sys.left->kind).stream;
  const auto& right = std::get<BernoulliSystem>(prod_sys.right->kind).stream;
  int differ = 0;
  for (std::uint64_t n = 0; n < 64; ++n) differ += left(n) != right(n) ? 1 : 0;
  CHECK(differ > 10);
}

TEST_CASE("CSV numbers round-trip exactly", "[experiment][csv]") {
  std::mt19937_64 gen(3);
  Table t{{"a", "b", "c"}, {}};
  for (int i = 0; i < 500; ++i) {
    double bits[3];
    for (double& v : bits) {
      do {
        const std::uint64_t u = gen();
        std::memcpy(&v, &u, sizeof v);
      } while (!std::isfinite(v));
    }
    t.rows.push_back({bits[0], bits[1], bits[2]});
  }
  t.rows.push_back({0.0, -0.0, 5e-324});
  t.rows.push_back({1.0, 0.1, -1.7976931348623157e308});
  std::stringstream ss;
  write_csv(ss, t);
  const std::string text = ss.str();
  CHECK(text.substr(0, 6) == "a,b,c\n");
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
  const Table back = read_csv(ss);
  REQUIRE(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < 3; ++c) CHECK(same_bits(back.rows[r][c], t.rows[r][c]));
  }
  std::stringstream bad("x,y\n1.0,abc\n");
  CHECK_THROWS_AS(read_csv(bad), ConfigError);
}

TEST_CASE("dumped sequences re-ingest to identical statistics", "[experiment][csv]") {
  const fs::path dir = scratch("dump");
  json dump_cfg = base_birkhoff();
  dump_cfg["N"] = 6000;
  const Table t = dump_sequence(dump_cfg);
  REQUIRE(t.rows.size() == 6000);
  CHECK(t.header == std::vector<std::string>{"n", "re", "im"});
  CHECK(t.rows.front()[0] == 1.0);
  write_csv(dir / "x.csv", t);

  const RunOutput direct = run_experiment(base_birkhoff());
  json ingest = base_birkhoff();
  ingest.erase("system");
  ingest.erase("observable");
  ingest["sequence"] = {{"type", "csv"}, {"path", (dir / "x.csv").string()}};
  const RunOutput replayed = run_experiment(ingest);
  REQUIRE(direct.record.results.size() == replayed.record.results.size());
  for (std::size_t i = 0; i < direct.record.results.size(); ++i) {
    CHECK(same_bits(direct.record.results[i].value, replayed.record.results[i].value));
  }

  ingest["N"] = 7000;
  CHECK_THROWS_AS(run_experiment(ingest), std::out_of_range);
  ingest["sequence"]["path"] = (dir / "missing.csv").string();
  CHECK_THROWS_AS(run_experiment(ingest), ConfigError);
}

TEST_CASE("outputs are written with artifacts listed", "[experiment]") {
  const fs::path dir = scratch("outputs");
  RunOutput out = run_experiment(load(kTestDir / "configs" / "classify.json"));
  write_outputs(out, dir);
  CHECK(fs::exists(dir / "record.json"));
  CHECK(out.record.artifacts.size() == 3);
  for (const std::string& a : out.record.artifacts) CHECK(fs::exists(a));
  const json report = load(dir / "mixing_report.json");
  CHECK(report.at("verdict") == "obstruction-found");
  const Table trace = read_csv(dir / "weak_defect_trace.csv");
  CHECK(trace.header == std::vector<std::string>{"n_or_N", "value"});
  CHECK(trace.rows.back()[0] == 20000.0);
  const RunRecord rec = RunRecord::from_json(load(dir / "record.json"));
  CHECK(replay_matches(rec, {}));
}

TEST_CASE("lemma names", "[experiment]") {
  CHECK(lemma_names().size() == 5);
  CHECK_THROWS_AS(verify_lemma("lemma-9-9"), ConfigError);
}
