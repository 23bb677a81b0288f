// ergolab command-line driver.
//
// Exit codes: 0 success, 1 gate failure or I/O error, 2 config schema error,
// 3 incompatible system/observable, 4 numeric guard.

#include <cerrno>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ergolab/errors.hpp"
#include "ergolab/experiment.hpp"

namespace {

using ergolab::json;

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ergolab::ConfigError("cannot read config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ergolab::ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

int run(const std::string& config, const std::string& out, unsigned threads) {
  ergolab::RunOutput res = ergolab::run_experiment(load_config(config), {threads});
  ergolab::write_outputs(res, out);
  std::cout << res.record.to_json().dump(2) << '\n';
  return 0;
}

int verify(const std::string& name, unsigned threads) {
  const ergolab::LemmaReport rep = ergolab::verify_lemma(name, {threads});
  for (const std::string& line : rep.lines) std::cout << name << ": " << line << '\n';
  std::cout << name << ": " << (rep.pass ? "PASS" : "FAIL") << '\n';
  return rep.pass ? 0 : 1;
}

int dump(const std::string& config, const std::string& out, unsigned threads) {
  const ergolab::Table t = ergolab::dump_sequence(load_config(config), {threads});
  if (out.empty()) {
    ergolab::write_csv(std::cout, t);
  } else {
    ergolab::write_csv(std::filesystem::path(out), t);
  }
  return 0;
}

// CLI11 silently ignores an out-of-range ERGOLAB_THREADS.
bool env_threads_valid() {
  const char* env = std::getenv("ERGOLAB_THREADS");
  if (env == nullptr) return true;
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(env, &end, 10);
  return *env != '\0' && *end == '\0' && errno == 0 && v >= 1 && v <= 1024;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: ergodic averages and mixing sequences"};
  app.require_subcommand(1);
  unsigned threads = 1;

  std::string config, out = "ergolab-out", dump_out, lemma;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--threads", threads, "Worker threads")
      ->envname("ERGOLAB_THREADS")
      ->check(CLI::Range(1u, 1024u));

  auto* verify_cmd = app.add_subcommand("verify-lemma", "Run a pinned check");
  verify_cmd->add_option("name", lemma, "Check name")->required()->check(CLI::IsMember(ergolab::lemma_names()));
  verify_cmd->add_option("--threads", threads, "Worker threads")
      ->envname("ERGOLAB_THREADS")
      ->check(CLI::Range(1u, 1024u));

  auto* dump_cmd = app.add_subcommand("dump-sequence", "Write a config's sequence as CSV");
  dump_cmd->add_option("config", config, "Sequence config (JSON)")->required();
  dump_cmd->add_option("--out", dump_out, "CSV file (default stdout)");
  dump_cmd->add_option("--threads", threads, "Worker threads")
      ->envname("ERGOLAB_THREADS")
      ->check(CLI::Range(1u, 1024u));

  if (!env_threads_valid()) {
    std::cerr << "ERGOLAB_THREADS must be an integer in [1, 1024]\n";
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run_cmd) return run(config, out, threads);
    if (*verify_cmd) return verify(lemma, threads);
    if (*dump_cmd) return dump(config, dump_out, threads);
  } catch (const ergolab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ergolab::IncompatibleError& e) {
    std::cerr << "incompatible: " << e.what() << '\n';
    return 3;
  } catch (const ergolab::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ergolab::NumericGuardError& e) {
    std::cerr << "numeric guard: " << e.what() << '\n';
    return 4;
  } catch (const ergolab::ProbeExhausted& e) {
    std::cerr << "numeric guard: " << e.what() << '\n';
    return 4;
  } catch (const std::out_of_range& e) {
    std::cerr << "numeric guard: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
