#include "ergolab/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

using Keys = std::initializer_list<const char*>;

void check_object(const json& j, Keys allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  return j.at(key);
}

std::uint64_t as_u64(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 0x1p64 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(where + ": expected a nonnegative integer");
}

std::int64_t as_i64(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::abs(d) < 0x1p62 && std::floor(d) == d) return static_cast<std::int64_t>(d);
  }
  throw ConfigError(where + ": expected an integer");
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  return v;
}

std::uint64_t u64_at(const json& j, const char* key, const std::string& where) {
  return as_u64(require(j, key, where), where + "." + key);
}

std::uint64_t u64_or(const json& j, const char* key, std::uint64_t fallback, const std::string& where) {
  return j.contains(key) ? as_u64(j.at(key), where + "." + key) : fallback;
}

double double_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? as_double(j.at(key), where + "." + key) : fallback;
}

std::uint32_t u32_of(std::uint64_t v, const std::string& where) {
  if (v > 0xFFFFFFFFull) throw ConfigError(where + ": value too large");
  return static_cast<std::uint32_t>(v);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const BernoulliSystem* first_bernoulli(const MPSystem& sys) {
  if (const auto* b = std::get_if<BernoulliSystem>(&sys.kind)) return b;
  if (const auto* p = std::get_if<ProductSystem>(&sys.kind)) {
    if (const auto* b = first_bernoulli(*p->left)) return b;
    return first_bernoulli(*p->right);
  }
  return nullptr;
}

std::vector<std::uint32_t> parse_word(const json& v, const std::string& where) {
  std::vector<std::uint32_t> w;
  for (const json& s : as_array(v, where)) w.push_back(u32_of(as_u64(s, where), where));
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// Descriptors

std::uint64_t component_seed(std::uint64_t seed, const std::string& path) {
  return CounterStream(seed).derive(fnv1a(path))(0);
}

CirclePoint parse_circle_point(const json& j) {
  if (j.is_number()) return CirclePoint::from_double(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "golden") return kGoldenRotation;
    if (s == "-golden") return -kGoldenRotation;
    throw ConfigError("circle point: unknown constant '" + s + "'");
  }
  if (j.is_object()) {
    check_object(j, {"u64", "decimal"}, "circle point");
    if (j.contains("u64")) {
      const json& u = j.at("u64");
      if (u.is_string()) {
        const std::string s = u.get<std::string>();
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 0);
        if (s.empty() || *end != '\0' || errno != 0 || s[0] == '-') {
          throw ConfigError("circle point: malformed u64 '" + s + "'");
        }
        return CirclePoint{v};
      }
      return CirclePoint{as_u64(u, "circle point.u64")};
    }
    if (j.contains("decimal")) return CirclePoint::from_double(as_double(j.at("decimal"), "circle point.decimal"));
  }
  throw ConfigError("circle point: expected a number, \"golden\", or {\"u64\", \"decimal\"}");
}

json circle_point_json(CirclePoint p) { return {{"u64", p.frac}, {"decimal", p.to_double()}}; }

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError("complex value: expected a number or [re, im]");
}

MPSystem parse_system(const json& j, std::uint64_t seed, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  const std::string type = as_string(require(j, "type", path), path + ".type");
  if (type == "rotation") {
    check_object(j, {"type", "alpha", "x0"}, path);
    const CirclePoint alpha = parse_circle_point(require(j, "alpha", path));
    const CirclePoint x0 = j.contains("x0") ? parse_circle_point(j.at("x0")) : CirclePoint{};
    return make_rotation(alpha, x0);
  }
  if (type == "bernoulli") {
    check_object(j, {"type", "probs"}, path);
    std::vector<double> probs;
    for (const json& p : as_array(require(j, "probs", path), path + ".probs")) {
      probs.push_back(as_double(p, path + ".probs"));
    }
    return make_bernoulli(std::move(probs), component_seed(seed, path));
  }
  if (type == "product") {
    check_object(j, {"type", "left", "right"}, path);
    return make_product(parse_system(require(j, "left", path), seed, path + ".left"),
                        parse_system(require(j, "right", path), seed, path + ".right"));
  }
  throw ConfigError(path + ": unknown system type '" + type + "'");
}

Observable parse_observable(const json& j, const MPSystem& sys) {
  const std::string where = "observable";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::string type = as_string(require(j, "type", where), where + ".type");
  Observable f;
  if (type == "exp") {
    check_object(j, {"type", "k", "centered"}, where);
    f = exp_observable(j.contains("k") ? as_i64(j.at("k"), where + ".k") : 1);
  } else if (type == "trig") {
    check_object(j, {"type", "terms", "centered"}, where);
    std::vector<TrigTerm> terms;
    for (const json& t : as_array(require(j, "terms", where), where + ".terms")) {
      check_object(t, {"k", "c"}, where + ".terms[]");
      terms.push_back({as_i64(require(t, "k", where), where + ".k"), parse_complex(require(t, "c", where))});
    }
    f = trig_observable(std::move(terms));
  } else if (type == "indicator") {
    check_object(j, {"type", "arcs", "weight", "centered"}, where);
    const Complex w = j.contains("weight") ? parse_complex(j.at("weight")) : Complex(1.0);
    std::vector<WeightedArc> pieces;
    for (const json& a : as_array(require(j, "arcs", where), where + ".arcs")) {
      if (!a.is_array() || a.size() != 2) throw ConfigError(where + ".arcs: expected [lo, hi] pairs");
      pieces.push_back({CircleArc::between(as_double(a[0], where), as_double(a[1], where)), w});
    }
    f = indicator_observable(std::move(pieces));
  } else if (type == "cylinder") {
    check_object(j, {"type", "alphabet", "window", "generator", "values", "table", "centered"}, where);
    const auto alphabet = u32_of(u64_or(j, "alphabet", 2, where), where + ".alphabet");
    const int sources = int(j.contains("generator")) + int(j.contains("values")) + int(j.contains("table"));
    if (sources != 1) throw ConfigError(where + ": give exactly one of generator, values, table");
    if (j.contains("generator")) {
      const std::string g = as_string(j.at("generator"), where + ".generator");
      if (g != "doubling_cos") throw ConfigError(where + ": unknown generator '" + g + "'");
      if (alphabet != 2) throw ConfigError(where + ": doubling_cos needs alphabet 2");
      f = doubling_cosine(u32_of(u64_at(j, "window", where), where + ".window"));
    } else if (j.contains("values")) {
      std::vector<Complex> values;
      for (const json& v : as_array(j.at("values"), where + ".values")) values.push_back(parse_complex(v));
      if (values.size() != alphabet) throw ConfigError(where + ": values must list one entry per symbol");
      f = first_symbol(std::move(values));
    } else {
      std::vector<Complex> table;
      for (const json& v : as_array(j.at("table"), where + ".table")) table.push_back(parse_complex(v));
      f = cylinder_observable(alphabet, u32_of(u64_at(j, "window", where), where + ".window"), std::move(table));
    }
  } else {
    throw ConfigError(where + ": unknown observable type '" + type + "'");
  }
  if (j.contains("centered")) {
    if (!j.at("centered").is_boolean()) throw ConfigError(where + ".centered: expected a boolean");
    if (j.at("centered").get<bool>()) f = centered(sys, std::move(f));
  }
  return f;
}

MeasurableSet parse_set(const json& j, const MPSystem& sys) {
  const std::string where = "set";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::string type = as_string(require(j, "type", where), where + ".type");
  if (type == "full") {
    check_object(j, {"type"}, where);
    return full_space(sys);
  }
  if (type == "empty") {
    check_object(j, {"type"}, where);
    return empty_set(sys);
  }
  if (type == "arcs") {
    check_object(j, {"type", "arcs"}, where);
    std::vector<std::pair<double, double>> bounds;
    for (const json& a : as_array(require(j, "arcs", where), where + ".arcs")) {
      if (!a.is_array() || a.size() != 2) throw ConfigError(where + ".arcs: expected [lo, hi] pairs");
      bounds.emplace_back(as_double(a[0], where), as_double(a[1], where));
    }
    return circle_set_from_bounds(bounds);
  }
  if (type == "cylinder") {
    check_object(j, {"type", "window", "words"}, where);
    const BernoulliSystem* b = first_bernoulli(sys);
    if (b == nullptr) throw IncompatibleError("cylinder set needs a Bernoulli system");
    std::vector<std::vector<std::uint32_t>> words;
    for (const json& w : as_array(require(j, "words", where), where + ".words")) {
      words.push_back(parse_word(w, where + ".words"));
    }
    const std::span<const double> probs = b->stream.probs();
    return cylinder_set(std::vector<double>(probs.begin(), probs.end()),
                        u32_of(u64_at(j, "window", where), where + ".window"), words);
  }
  throw ConfigError(where + ": unknown set type '" + type + "'");
}

BlockSpec parse_block_spec(const json& j) {
  const std::string where = "block";
  check_object(j, {"type", "alpha", "k", "generalized"}, where);
  BlockSpec spec;
  spec.alpha = j.contains("alpha") ? parse_circle_point(j.at("alpha")) : kGoldenRotation;
  spec.f = exp_observable(j.contains("k") ? as_i64(j.at("k"), where + ".k") : 1);
  if (j.contains("generalized")) {
    const json& g = j.at("generalized");
    check_object(g, {"points", "gaps"}, where + ".generalized");
    GeneralizedBlocks gb;
    const json& pts = require(g, "points", where + ".generalized");
    const std::string ptype = as_string(require(pts, "type", where + ".points"), where + ".points.type");
    if (ptype == "rotation") {
      check_object(pts, {"type", "beta", "offset"}, where + ".points");
      gb.points = rotation_points(parse_circle_point(require(pts, "beta", where + ".points")),
                                  pts.contains("offset") ? parse_circle_point(pts.at("offset")) : CirclePoint{});
    } else if (ptype == "van_der_corput") {
      check_object(pts, {"type"}, where + ".points");
      gb.points = van_der_corput_points();
    } else {
      throw ConfigError(where + ".points: unknown type '" + ptype + "'");
    }
    const json& gaps = require(g, "gaps", where + ".generalized");
    const std::string gtype = as_string(require(gaps, "type", where + ".gaps"), where + ".gaps.type");
    if (gtype != "power") throw ConfigError(where + ".gaps: unknown type '" + gtype + "'");
    check_object(gaps, {"type", "exponent"}, where + ".gaps");
    gb.gaps = power_gaps(as_double(require(gaps, "exponent", where + ".gaps"), where + ".gaps.exponent"));
    spec.generalized = std::move(gb);
  }
  return spec;
}

TrigPolynomial parse_trig_polynomial(const json& j) {
  const std::string where = "trig_polynomial";
  TrigPolynomial p;
  for (const json& t : as_array(j, where)) {
    check_object(t, {"beta", "c"}, where + "[]");
    p.terms.push_back({parse_circle_point(require(t, "beta", where)), parse_complex(require(t, "c", where))});
  }
  return p;
}

ComplexSeq parse_sequence(const json& j, std::uint64_t seed, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  const std::string type = as_string(require(j, "type", path), path + ".type");
  if (type == "orbit") {
    check_object(j, {"type", "system", "observable"}, path);
    const MPSystem sys = parse_system(require(j, "system", path), seed, path + ".system");
    return orbit_sequence(sys, parse_observable(require(j, "observable", path), sys));
  }
  if (type == "block") return block_sequence(parse_block_spec(j));
  if (type == "trig") {
    check_object(j, {"type", "terms"}, path);
    return as_sequence(parse_trig_polynomial(require(j, "terms", path)));
  }
  if (type == "constant") {
    check_object(j, {"type", "value"}, path);
    return ComplexSeq::constant(j.contains("value") ? parse_complex(j.at("value")) : Complex(1.0));
  }
  if (type == "alternating") {
    check_object(j, {"type"}, path);
    return ComplexSeq::alternating();
  }
  if (type == "character") {
    check_object(j, {"type", "angle"}, path);
    return ComplexSeq::character(parse_circle_point(require(j, "angle", path)));
  }
  if (type == "csv") {
    check_object(j, {"type", "path"}, path);
    const std::filesystem::path file = as_string(require(j, "path", path), path + ".path");
    if (!std::filesystem::exists(file)) throw ConfigError(path + ": no such file " + file.string());
    const Table t = read_csv(file);
    if (t.header.size() != 3 || t.header[0] != "n" || t.header[1] != "re" || t.header[2] != "im") {
      throw ConfigError(path + ": expected columns n,re,im");
    }
    if (t.rows.empty()) throw ConfigError(path + ": no rows");
    const double first = t.rows.front()[0];
    std::vector<Complex> values;
    values.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.rows[i][0] != first + static_cast<double>(i)) throw ConfigError(path + ": n must be consecutive");
      values.emplace_back(t.rows[i][1], t.rows[i][2]);
    }
    if (!(first >= 0.0)) throw ConfigError(path + ": n must be nonnegative");
    return ComplexSeq::from_values(std::move(values), static_cast<std::uint64_t>(first));
  }
  throw ConfigError(path + ": unknown sequence type '" + type + "'");
}

SubsequenceSchedule parse_schedule(const json& j, const ComplexSeq* x) {
  const std::string where = "schedule";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::string type = as_string(require(j, "type", where), where + ".type");
  if (type == "arithmetic") {
    check_object(j, {"type", "start", "step", "count"}, where);
    return SubsequenceSchedule::arithmetic(u64_at(j, "start", where), u64_at(j, "step", where),
                                           u64_at(j, "count", where));
  }
  if (type == "geometric") {
    check_object(j, {"type", "start", "ratio", "max"}, where);
    return SubsequenceSchedule::geometric(u64_at(j, "start", where),
                                          as_double(require(j, "ratio", where), where + ".ratio"),
                                          u64_at(j, "max", where));
  }
  if (type == "explicit") {
    check_object(j, {"type", "horizons"}, where);
    std::vector<std::uint64_t> hz;
    for (const json& v : as_array(require(j, "horizons", where), where + ".horizons")) {
      hz.push_back(as_u64(v, where + ".horizons"));
    }
    return SubsequenceSchedule(std::move(hz));
  }
  if (type == "greedy") {
    check_object(j, {"type", "k_max", "N_probe", "ratio", "tolerance"}, where);
    if (x == nullptr) throw ConfigError(where + ": greedy schedule needs a sequence");
    GreedyOptions opts;
    opts.ratio = double_or(j, "ratio", opts.ratio, where);
    opts.tolerance = double_or(j, "tolerance", opts.tolerance, where);
    return greedy_schedule(*x, u64_at(j, "k_max", where), u64_at(j, "N_probe", where), opts);
  }
  throw ConfigError(where + ": unknown schedule type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Records and CSV

json RunRecord::to_json() const {
  json res = json::array();
  for (const ScalarResult& r : results) {
    res.push_back({{"name", r.name}, {"value", r.value}, {"params", r.params}, {"seed", r.seed}});
  }
  return {{"config", config},   {"results", res},        {"artifacts", artifacts},
          {"wall_time", wall_time}, {"version", version}};
}

RunRecord RunRecord::from_json(const json& j) {
  check_object(j, {"config", "results", "artifacts", "wall_time", "version"}, "record");
  RunRecord rec;
  rec.config = require(j, "config", "record");
  for (const json& r : as_array(require(j, "results", "record"), "record.results")) {
    ScalarResult s;
    s.name = as_string(require(r, "name", "result"), "result.name");
    s.value = as_double(require(r, "value", "result"), "result.value");
    s.params = r.value("params", json::object());
    s.seed = as_u64(require(r, "seed", "result"), "result.seed");
    rec.results.push_back(std::move(s));
  }
  if (j.contains("artifacts")) rec.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  rec.wall_time = j.value("wall_time", 0.0);
  rec.version = j.value("version", std::string(kVersion));
  return rec;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Table& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_csv(os, t);
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(is, line)) throw ConfigError("csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line)) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') throw ConfigError("csv: malformed number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw ConfigError("csv: row width differs from header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  return read_csv(is);
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

const std::set<std::string> kTopLevelKeys = {
    "kind",  "seed",    "description", "system", "observable", "sequence",    "sequence_y", "schedule",
    "N",     "H",       "K",           "M",      "h_min",      "h_max",       "m_max",      "lambda",
    "polynomial", "set_a", "set_b",    "betas",  "block",      "trig_polynomial", "thresholds", "trace_points",
    "first"};

class Runner {
 public:
  Runner(const json& cfg, Parallelism par) : cfg_(cfg), par_(par) {
    if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      (void)value;
      if (!kTopLevelKeys.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
    }
    seed_ = as_u64(require(cfg, "seed", "config"), "config.seed");
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t u64(const char* key) const { return u64_at(cfg_, key, "config"); }
  std::uint64_t u64(const char* key, std::uint64_t fallback) const { return u64_or(cfg_, key, fallback, "config"); }

  MPSystem system() const { return parse_system(require(cfg_, "system", "config"), seed_, "system"); }

  ComplexSeq x() const {
    if (cfg_.contains("sequence")) return parse_sequence(cfg_.at("sequence"), seed_, "sequence");
    if (cfg_.contains("system") && cfg_.contains("observable")) {
      const MPSystem sys = system();
      return orbit_sequence(sys, parse_observable(cfg_.at("observable"), sys));
    }
    throw ConfigError("config: needs 'sequence' or 'system' with 'observable'");
  }

  ComplexSeq y(const ComplexSeq& x) const {
    if (cfg_.contains("sequence_y")) return parse_sequence(cfg_.at("sequence_y"), seed_, "sequence_y");
    return x;
  }

  SubsequenceSchedule schedule(const ComplexSeq& x) const {
    return parse_schedule(require(cfg_, "schedule", "config"), &x);
  }

  void add(const std::string& name, double value, json params = json::object()) {
    out_.record.results.push_back({name, value, std::move(params), seed_});
  }
  void add_complex(const std::string& name, Complex z, const json& params = json::object()) {
    add(name + "_re", z.real(), params);
    add(name + "_im", z.imag(), params);
    add(name + "_abs", std::abs(z), params);
  }
  void table(const std::string& stem, Table t) { out_.tables.emplace_back(stem, std::move(t)); }
  void document(const std::string& stem, json j) { out_.documents.emplace_back(stem, std::move(j)); }

  RunOutput run();

 private:
  void birkhoff();
  void wiener_wintner();
  void profile(const std::string& kind);
  void compactness();
  void besicovitch();
  void block_sequence_kind();
  void adversarial();
  void polynomial();
  void classify();
  void converse();

  const json& cfg_;
  Parallelism par_;
  std::uint64_t seed_ = 0;
  RunOutput out_;
};

RunOutput Runner::run() {
  const std::string kind = as_string(require(cfg_, "kind", "config"), "config.kind");
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw ConfigError("config: unknown experiment kind '" + kind + "'");
  }
  const auto t0 = std::chrono::steady_clock::now();
  if (kind == "birkhoff") {
    birkhoff();
  } else if (kind == "wiener-wintner") {
    wiener_wintner();
  } else if (kind == "profile" || kind == "weak-mixing-stat" || kind == "strong-mixing-stat" ||
             kind == "squares-cesaro") {
    profile(kind);
  } else if (kind == "compactness") {
    compactness();
  } else if (kind == "besicovitch") {
    besicovitch();
  } else if (kind == "block-sequence") {
    block_sequence_kind();
  } else if (kind == "adversarial") {
    adversarial();
  } else if (kind == "polynomial-average") {
    polynomial();
  } else if (kind == "classify") {
    classify();
  } else if (kind == "converse") {
    converse();
  }
  out_.record.config = cfg_;
  out_.record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::move(out_);
}

void Runner::birkhoff() {
  const std::uint64_t N = u64("N");
  add_complex("cesaro_average", cesaro_average(x(), N, par_), {{"N", N}});
}

void Runner::wiener_wintner() {
  const std::uint64_t N = u64("N");
  const TwistParameter lam{parse_circle_point(require(cfg_, "lambda", "config"))};
  add_complex("twisted_average", twisted_average(x(), lam, N, par_),
              {{"N", N}, {"lambda", circle_point_json(lam.angle)}});
}

void Runner::profile(const std::string& kind) {
  const ComplexSeq xs = x();
  const SubsequenceSchedule sched = schedule(xs);
  std::size_t H = 0;
  if (kind == "strong-mixing-stat") {
    H = u64("h_max");
  } else if (kind == "squares-cesaro") {
    const std::uint64_t Hs = u64("H");
    H = Hs * Hs;
  } else {
    H = u64("H", default_lag_count(sched));
  }
  if (H == 0) throw ConfigError("config: lag range must be positive");
  const CorrelationProfile prof = correlation_profile(xs, y(xs), sched, H, {}, par_);
  const json base = {{"N_max", sched.back()}, {"horizons", sched.size()}};

  Table t{{"h", "re_ell", "im_ell", "abs_ell", "instability"}, {}};
  for (std::size_t h = 0; h <= H; ++h) {
    const Complex e = prof.estimate[h];
    t.rows.push_back({static_cast<double>(h), e.real(), e.imag(), std::abs(e), prof.instability[h]});
  }
  table("profile", std::move(t));

  if (kind == "profile" || kind == "weak-mixing-stat") {
    json p = base;
    p["H"] = H;
    add("weak_mixing_statistic", weak_mixing_statistic(prof, H), p);
    if (kind == "profile") {
      add("max_instability", *std::max_element(prof.instability.begin(), prof.instability.end()), p);
    }
  } else if (kind == "strong-mixing-stat") {
    const std::uint64_t h_min = u64("h_min");
    json p = base;
    p["h_min"] = h_min;
    p["h_max"] = H;
    add("strong_mixing_statistic", strong_mixing_statistic(prof, h_min, H), p);
    double inst = 0.0;
    for (std::size_t h = h_min; h <= H; ++h) inst = std::max(inst, prof.instability[h]);
    add("instability", inst, p);
  } else {
    const std::uint64_t Hs = u64("H");
    json p = base;
    p["H"] = Hs;
    add("squares_cesaro", squares_cesaro(prof, Hs), p);
  }
}

void Runner::compactness() {
  const std::uint64_t K = u64("K"), M = u64("M"), N = u64("N");
  add("compactness_statistic", compactness_statistic(x(), K, M, N, par_), {{"K", K}, {"M", M}, {"N", N}});
}

void Runner::besicovitch() {
  const std::uint64_t N = u64("N");
  const TrigPolynomial p = parse_trig_polynomial(require(cfg_, "trig_polynomial", "config"));
  add("besicovitch_distance", besicovitch_distance(x(), p, N, par_), {{"N", N}});
}

void Runner::block_sequence_kind() {
  const std::uint64_t N = u64("N");
  const BlockSpec spec = cfg_.contains("block") ? parse_block_spec(cfg_.at("block")) : BlockSpec{kGoldenRotation, exp_observable(1), std::nullopt};
  const ComplexSeq blocks = block_sequence(spec);
  const std::uint64_t h = u64("h_max", 0);
  Table t{{"beta", "h", "abs_corr", "bound"}, {}};
  std::size_t i = 0;
  for (const json& b : as_array(require(cfg_, "betas", "config"), "config.betas")) {
    const CirclePoint beta = parse_circle_point(b);
    const double gap = std::abs(Complex(1.0) - unit_phasor(-beta));
    if (gap == 0.0) throw DomainError("block-sequence: beta must be nonzero mod 1");
    const double bound = 2.0 / ((std::sqrt(2.0 * static_cast<double>(N)) - 1.0) * gap);
    const Complex c = correlation_at(blocks, ComplexSeq::character(beta), h, N, par_);
    const json p = {{"N", N}, {"h", h}, {"beta", circle_point_json(beta)}, {"index", i}};
    add("abs_correlation", std::abs(c), p);
    add("proof_bound", bound, p);
    t.rows.push_back({beta.to_double(), static_cast<double>(h), std::abs(c), bound});
    ++i;
  }
  table("block_sequence", std::move(t));
}

void Runner::adversarial() {
  const ComplexSeq xs = x();
  const SubsequenceSchedule sched = schedule(xs);
  const AdversarialCompanion comp = adversarial_companion(xs, sched);
  const std::uint64_t m_max = u64("m_max"), h_max = u64("h_max");
  Table t{{"m", "h", "horizon", "re_corr", "im_corr", "shifted_l1_mean", "lower_bound", "margin", "holds"}, {}};
  std::uint64_t covered = 0, uncovered = 0, violations = 0;
  double min_margin = INFINITY;
  for (std::uint64_t m = 0; m <= m_max; ++m) {
    for (std::uint64_t h = 0; h <= h_max; ++h) {
      if (!comp.covers(m, h)) {
        ++uncovered;
        continue;
      }
      const AdversarialPairCheck c = check_adversarial_pair(xs, comp, m, h, par_);
      ++covered;
      violations += c.holds ? 0 : 1;
      min_margin = std::min(min_margin, c.margin);
      t.rows.push_back({static_cast<double>(m), static_cast<double>(h), static_cast<double>(c.horizon),
                        c.realized.real(), c.realized.imag(), c.shifted_l1_mean, c.lower_bound, c.margin,
                        c.holds ? 1.0 : 0.0});
    }
  }
  const json p = {{"m_max", m_max}, {"h_max", h_max}, {"levels", sched.size()}};
  add("covered_pairs", static_cast<double>(covered), p);
  add("uncovered_pairs", static_cast<double>(uncovered), p);
  add("violations", static_cast<double>(violations), p);
  if (covered > 0) add("min_margin", min_margin, p);
  table("adversarial", std::move(t));
}

void Runner::polynomial() {
  const std::uint64_t N = u64("N");
  const MPSystem sys = system();
  const Observable f = parse_observable(require(cfg_, "observable", "config"), sys);
  std::vector<std::int64_t> coeffs;
  for (const json& c : as_array(require(cfg_, "polynomial", "config"), "config.polynomial")) {
    coeffs.push_back(as_i64(c, "config.polynomial"));
  }
  const IntPolynomial p(coeffs);
  add_complex("polynomial_average", polynomial_average(sys, f, p, N, par_), {{"N", N}, {"polynomial", coeffs}});
}

void Runner::classify() {
  const MPSystem sys = system();
  const MeasurableSet a = parse_set(require(cfg_, "set_a", "config"), sys);
  const MeasurableSet b = parse_set(require(cfg_, "set_b", "config"), sys);
  ClassifyOptions opts;
  opts.N = u64("N");
  opts.h_min = u64("h_min", opts.h_min);
  opts.h_max = u64("h_max", opts.h_max);
  opts.trace_points = u64("trace_points", opts.trace_points);
  if (cfg_.contains("thresholds")) {
    const json& th = cfg_.at("thresholds");
    check_object(th, {"weak", "strong", "witness"}, "thresholds");
    if (th.contains("weak")) opts.weak_threshold = as_double(th.at("weak"), "thresholds.weak");
    if (th.contains("strong")) opts.strong_threshold = as_double(th.at("strong"), "thresholds.strong");
    opts.witness_threshold = double_or(th, "witness", opts.witness_threshold, "thresholds");
  }
  const MixingReport rep = classify_mixing(sys, a, b, opts, par_);
  const json p = {{"N", opts.N}, {"h_min", opts.h_min}, {"h_max", opts.h_max}};
  json pv = p;
  pv["verdict"] = to_string(rep.verdict);
  pv["witness"] = rep.witness;
  add("verdict", static_cast<double>(static_cast<int>(rep.verdict)), pv);
  add("witness_value", rep.witness_value, p);
  add("weak_mixing_defect", rep.weak_defect_trace.back().second, p);
  double strong = 0.0;
  for (const auto& [n, v] : rep.strong_defect_trace) strong = std::max(strong, v);
  add("strong_mixing_defect", strong, p);
  if (rep.eigenfunction_statistic) add("eigenfunction_statistic", *rep.eigenfunction_statistic, p);

  Table weak{{"n_or_N", "value"}, {}};
  for (const auto& [n, v] : rep.weak_defect_trace) weak.rows.push_back({static_cast<double>(n), v});
  Table strong_t{{"n_or_N", "value"}, {}};
  for (const auto& [n, v] : rep.strong_defect_trace) strong_t.rows.push_back({static_cast<double>(n), v});
  table("weak_defect_trace", std::move(weak));
  table("strong_defect_trace", std::move(strong_t));
  json doc = {{"verdict", to_string(rep.verdict)},
              {"witness", rep.witness},
              {"witness_value", rep.witness_value},
              {"weak_threshold", rep.weak_threshold},
              {"strong_threshold", rep.strong_threshold}};
  if (rep.eigenfunction_statistic) doc["eigenfunction_statistic"] = *rep.eigenfunction_statistic;
  document("mixing_report", std::move(doc));
}

void Runner::converse() {
  const MPSystem sys = system();
  const MeasurableSet a = parse_set(require(cfg_, "set_a", "config"), sys);
  const MeasurableSet b = parse_set(require(cfg_, "set_b", "config"), sys);
  const std::uint64_t N = u64("N"), h_min = u64("h_min", 0), h_max = u64("h_max");
  const ConverseReport rep = converse_reconstruction(sys, a, b, h_min, h_max, N, par_);
  const json p = {{"N", N}, {"h_min", h_min}, {"h_max", h_max}};
  add("max_residual", rep.max_residual, p);
  add("max_tail_gap", rep.max_tail_gap, p);
  add("product_measure", rep.product_measure, p);
  Table t{{"h", "empirical", "centered_correlation", "birkhoff_term", "residual", "tail_gap", "exact"}, {}};
  for (const ConverseRow& r : rep.rows) {
    t.rows.push_back({static_cast<double>(r.h), r.empirical, r.centered_correlation, r.birkhoff_term, r.residual,
                      r.tail_gap, r.exact.value_or(NAN)});
  }
  table("converse", std::move(t));
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "birkhoff",    "wiener-wintner", "profile",         "weak-mixing-stat",   "strong-mixing-stat",
      "compactness", "besicovitch",    "block-sequence",  "adversarial",        "polynomial-average",
      "squares-cesaro", "classify",    "converse"};
  return kinds;
}

RunOutput run_experiment(const json& config, Parallelism par) { return Runner(config, par).run(); }

void write_outputs(RunOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  out.record.artifacts.clear();
  for (const auto& [stem, t] : out.tables) {
    const auto path = dir / (stem + ".csv");
    write_csv(path, t);
    out.record.artifacts.push_back(path.string());
  }
  for (const auto& [stem, doc] : out.documents) {
    const auto path = dir / (stem + ".json");
    std::ofstream(path) << doc.dump(2) << '\n';
    out.record.artifacts.push_back(path.string());
  }
  std::ofstream os(dir / "record.json");
  if (!os) throw std::runtime_error("cannot write " + (dir / "record.json").string());
  os << out.record.to_json().dump(2) << '\n';
}

bool replay_matches(const RunRecord& rec, Parallelism par, std::string* diff) {
  const RunOutput again = run_experiment(rec.config, par);
  std::ostringstream msg;
  bool same = again.record.results.size() == rec.results.size();
  if (!same) msg << "result count " << rec.results.size() << " -> " << again.record.results.size() << '\n';
  for (std::size_t i = 0; same && i < rec.results.size(); ++i) {
    const ScalarResult& a = rec.results[i];
    const ScalarResult& b = again.record.results[i];
    if (a.name != b.name || std::bit_cast<std::uint64_t>(a.value) != std::bit_cast<std::uint64_t>(b.value)) {
      same = false;
      msg << a.name << ": " << format_number(a.value) << " -> " << b.name << ": " << format_number(b.value) << '\n';
    }
  }
  if (diff != nullptr) *diff = msg.str();
  return same;
}

Table dump_sequence(const json& config, Parallelism par) {
  const Runner r(config, par);
  const std::uint64_t N = r.u64("N");
  const std::uint64_t first = r.u64("first", 1);
  const std::vector<Complex> v = r.x().materialize(first, N, par);
  Table t{{"n", "re", "im"}, {}};
  t.rows.reserve(N);
  for (std::uint64_t k = 0; k < N; ++k) t.rows.push_back({static_cast<double>(first + k), v[k].real(), v[k].imag()});
  return t;
}

}  // namespace ergolab
