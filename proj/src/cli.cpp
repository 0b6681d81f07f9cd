#include "pbcover/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace pbcover {

using nlohmann::json;

std::string to_string(RunKind kind) {
  switch (kind) {
    case RunKind::PbEval: return "pbeval";
    case RunKind::Minimize: return "minimize";
    case RunKind::Sweep: return "sweep";
    case RunKind::Check: return "check";
    case RunKind::Hilbert: return "hilbert";
  }
  return "pbeval";
}

RunKind run_kind_from_string(const std::string& name) {
  for (auto k : {RunKind::PbEval, RunKind::Minimize, RunKind::Sweep, RunKind::Check, RunKind::Hilbert})
    if (to_string(k) == name) return k;
  throw Error("unknown run kind '" + name + "'");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Validation.

namespace {

std::string hex64(std::uint64_t h) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : doc_.items())
      if (!ok.count(k)) throw ConfigError(path_ + "/" + k, "unknown property");
  }
  bool has(const char* key) const { return doc_.contains(key); }
  std::string at(const char* key) const { return path_ + "/" + key; }

  const json& require(const char* key) const {
    if (!doc_.contains(key)) throw ConfigError(at(key), "is required");
    return doc_.at(key);
  }

  double number(const char* key, double fallback, double lo, double hi, bool open_lo = false) const {
    if (!has(key)) return fallback;
    return number(key, lo, hi, open_lo);
  }
  double number(const char* key, double lo, double hi, bool open_lo = false) const {
    const auto& v = require(key);
    if (!v.is_number()) throw ConfigError(at(key), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x > hi || (open_lo ? x <= lo : x < lo)) {
      std::ostringstream msg;
      msg << "must lie in " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      throw ConfigError(at(key), msg.str());
    }
    return x;
  }
  long long integer(const char* key, long long fallback, long long lo, long long hi) const {
    if (!has(key)) return fallback;
    return integer(key, lo, hi);
  }
  long long integer(const char* key, long long lo, long long hi) const {
    const auto& v = require(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
      throw ConfigError(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }
  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!doc_.at(key).is_boolean()) throw ConfigError(at(key), "must be a boolean");
    return doc_.at(key).get<bool>();
  }
  std::string choice(const char* key, const std::string& fallback, std::initializer_list<const char*> options) const {
    if (!has(key)) return fallback;
    return choice(key, options);
  }
  std::string choice(const char* key, std::initializer_list<const char*> options) const {
    const auto& v = require(key);
    if (!v.is_string()) throw ConfigError(at(key), "must be a string");
    const auto s = v.get<std::string>();
    for (const char* o : options)
      if (s == o) return s;
    std::string list;
    for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
    throw ConfigError(at(key), "must be one of " + list);
  }
  Section sub(const char* key) const { return Section(require(key), at(key)); }

  std::vector<double> numbers(const char* key, std::size_t min_size, std::size_t max_size) const {
    const auto& v = require(key);
    if (!v.is_array() || v.size() < min_size || v.size() > max_size)
      throw ConfigError(at(key), "must be an array of " + std::to_string(min_size) + ".." +
                                     std::to_string(max_size) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
        throw ConfigError(at(key) + "/" + std::to_string(i), "must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<Point2> points(const char* key, std::size_t min_size) const {
    const auto& v = require(key);
    if (!v.is_array() || v.size() < min_size)
      throw ConfigError(at(key), "must be an array of at least " + std::to_string(min_size) + " points");
    std::vector<Point2> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto p = at(key) + "/" + std::to_string(i);
      if (!v[i].is_array() || v[i].size() != 2 || !v[i][0].is_number() || !v[i][1].is_number())
        throw ConfigError(p, "must be a pair [x, y]");
      out.push_back({v[i][0].get<double>(), v[i][1].get<double>()});
    }
    return out;
  }

 private:
  const json& doc_;
  std::string path_;
};

void validate_surface(const Section& s) {
  s.allow({"kind", "area", "grid", "pole_band"});
  s.choice("kind", {"plane", "torus", "sphere"});
  s.number("area", 0.0, 1e12, true);
  const auto g = s.numbers("grid", 2, 2);
  for (int i = 0; i < 2; ++i)
    if (g[i] != std::floor(g[i]) || g[i] < 4 || g[i] > 4096)
      throw ConfigError(s.at("grid") + "/" + std::to_string(i), "must be an integer in [4, 4096]");
  s.number("pole_band", 0.0, 0.0, 1e12);
}

void validate_cover(const Section& s) {
  s.allow({"type", "capacity", "eta", "allow_overflow", "centers", "count", "euler", "max_k", "vertices",
           "closed", "samples", "preset"});
  const auto type = s.choice("type", {"disks", "lattice", "three_disk", "caps", "path"});
  s.number("capacity", 0.0, 1e12, true);
  s.number("eta", 0.1, 0.0, 0.99);
  s.boolean("allow_overflow", false);
  if (type == "disks") s.points("centers", 1);
  if (type == "lattice") s.integer("max_k", 16, 1, 64);
  if (type == "caps") {
    const auto count = s.integer("count", 2, 6);
    if (count == 3) throw ConfigError(s.at("count"), "must be 2, 4, 5 or 6");
    if (s.has("euler")) s.numbers("euler", 3, 3);
  }
  if (type == "path") {
    if (s.has("preset")) s.choice("preset", {"two_row"});
    else s.points("vertices", 2);
    s.boolean("closed", true);
    s.integer("samples", 2, 1 << 16);
  }
}

void validate_partition(const Section& s) {
  s.allow({"profile", "exponent", "plateau", "family"});
  s.choice("profile", "smoothstep-power", {"smoothstep-power", "polynomial", "flat-exponential"});
  s.number("exponent", 2.0, 2.0, 64.0);
  s.number("plateau", 0.0, 0.0, 0.99);
  if (s.has("family")) {
    const auto f = s.sub("family");
    f.allow({"amplitudes", "offsets", "offset_fraction"});
    f.boolean("amplitudes", true);
    f.boolean("offsets", false);
    f.number("offset_fraction", 0.25, 0.0, 1.0);
  }
}

void validate_pb(const Section& s) {
  s.allow({"method", "restarts", "exact_limit", "order", "polar", "prune"});
  s.choice("method", "auto", {"auto", "exact", "heuristic", "rank2"});
  s.integer("restarts", 32, 1, 1 << 20);
  s.integer("exact_limit", 16, 1, 24);
  if (s.has("order") && s.integer("order", 2, 4) == 3) throw ConfigError(s.at("order"), "must be 2 or 4");
  s.choice("polar", "strict", {"strict", "mask"});
  s.boolean("prune", true);
}

void validate_optimizer(const Section& s) {
  s.allow({"restarts", "evaluations", "initial_step", "tolerance"});
  s.integer("restarts", 8, 1, 1 << 16);
  s.integer("evaluations", 500, 1, 1 << 24);
  s.number("initial_step", 0.2, 0.0, 1.0, true);
  s.number("tolerance", 1e-10, 0.0, 1.0);
}

void validate_sweep(const Section& s) {
  s.allow({"capacities", "extra_templates", "tolerance"});
  const auto cs = s.numbers("capacities", 0, 4096);
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (!(cs[i] > 0.0) || (i > 0 && !(cs[i] > cs[i - 1])))
      throw ConfigError(s.at("capacities") + "/" + std::to_string(i), "capacities must be positive and increasing");
  s.integer("extra_templates", 2, 0, 8);
  s.number("tolerance", 0.05, 0.0, 10.0);
}

void validate_check(const Section& s) {
  s.allow({"name", "larger_capacity", "cells_per_third", "curve_order", "capacity", "bicover_cells",
           "inner_samples", "weight_draws", "tolerance"});
  const auto name = s.choice("name", {"polterovich", "reduction", "coarse_graining", "restriction"});
  if (name == "restriction") s.number("larger_capacity", 0.0, 1e12, true);
  s.integer("cells_per_third", 1, 1, 64);
  s.integer("curve_order", 2, 1, 5);
  s.number("capacity", 0.3, 0.0, 1e12, true);
  s.integer("bicover_cells", 32, 4, 4096);
  s.integer("inner_samples", 16, 1, 4096);
  s.integer("weight_draws", 32, 1, 1 << 20);
  s.number("tolerance", 1e-9, 0.0, 1.0);
}

void validate_hilbert(const Section& s) {
  s.allow({"dimension", "max_order"});
  const auto d = s.integer("dimension", 1, 6);
  s.integer("max_order", 1, 62 / d - 1);
}

}  // namespace

RunConfig parse_run_config(const json& document, std::optional<RunKind> kind, std::optional<std::uint64_t> seed) {
  const Section top(document, "");
  top.allow({"schema_version", "kind", "seed", "out", "surface", "cover", "partition", "pb", "optimizer", "sweep",
             "check", "hilbert"});
  if (top.integer("schema_version", 0, 1 << 20) != kSchemaVersion)
    throw ConfigError("/schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");

  RunConfig config;
  config.document = document;
  if (top.has("kind")) {
    const auto k = run_kind_from_string(top.choice("kind", {"pbeval", "minimize", "sweep", "check", "hilbert"}));
    if (kind && *kind != k)
      throw ConfigError("/kind", "config is a '" + to_string(k) + "' run, not '" + to_string(*kind) + "'");
    config.kind = k;
  } else if (kind) {
    config.kind = *kind;
  } else {
    throw ConfigError("/kind", "is required");
  }
  config.document["kind"] = to_string(config.kind);

  if (top.has("seed")) {
    const auto& v = document.at("seed");
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError("/seed", "must be a non-negative integer");
    config.seed = v.get<std::uint64_t>();
  }
  if (seed) config.seed = seed;
  if (config.seed) config.document["seed"] = *config.seed;
  if (top.has("out")) {
    if (!document.at("out").is_string()) throw ConfigError("/out", "must be a string");
    config.out = document.at("out").get<std::string>();
  }

  const bool stochastic = config.kind == RunKind::Minimize || config.kind == RunKind::Sweep ||
                          config.kind == RunKind::Check ||
                          (top.has("pb") && document.at("pb").value("method", "") == "heuristic");
  if (stochastic && !config.seed) throw ConfigError("/seed", "is required for " + to_string(config.kind) + " runs");

  if (config.kind == RunKind::Hilbert) {
    validate_hilbert(top.sub("hilbert"));
    return config;
  }
  validate_surface(top.sub("surface"));
  if (top.has("cover")) validate_cover(top.sub("cover"));
  if (top.has("partition")) validate_partition(top.sub("partition"));
  if (top.has("pb")) validate_pb(top.sub("pb"));
  if (top.has("optimizer")) validate_optimizer(top.sub("optimizer"));
  switch (config.kind) {
    case RunKind::PbEval: top.require("cover"); break;
    case RunKind::Minimize:
      if (top.sub("cover").choice("type", {"disks", "lattice", "three_disk", "caps", "path"}) == "path")
        throw ConfigError("/cover/type", "minimize needs a finite cover");
      break;
    case RunKind::Sweep: validate_sweep(top.sub("sweep")); break;
    case RunKind::Check: {
      const auto check = top.sub("check");
      validate_check(check);
      if (check.choice("name", {"polterovich", "reduction", "coarse_graining", "restriction"}) != "reduction")
        top.require("cover");
      break;
    }
    case RunKind::Hilbert: break;
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path, std::optional<RunKind> kind,
                          std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_run_config(doc, kind, seed);
}

// ---------------------------------------------------------------------------
// Scenario construction.

Partition Scenario::partition() const {
  if (discrete) return canonical_partition(*discrete, profile);
  if (continuous) return canonical_partition(*continuous, profile);
  throw Error("scenario has no cover");
}

Scenario build_scenario(const RunConfig& config) {
  const json& doc = config.document;
  const json& s = doc.at("surface");
  const auto grid = s.at("grid");
  Scenario sc{make_surface(surface_kind_from_string(s.at("kind").get<std::string>()), s.at("area").get<double>(),
                           {grid[0].get<int>(), grid[1].get<int>()}, s.value("pole_band", 0.0)),
              {}, {}, {}, {}, {}};
  if (doc.contains("partition")) {
    const json& p = doc.at("partition");
    sc.profile.kind = profile_kind_from_string(p.value("profile", "smoothstep-power"));
    sc.profile.exponent = p.value("exponent", 2.0);
    sc.profile.plateau = p.value("plateau", 0.0);
    sc.family.kind = sc.profile.kind;
    if (p.contains("family")) {
      const json& f = p.at("family");
      sc.family.amplitudes = f.value("amplitudes", true);
      sc.family.offsets = f.value("offsets", false);
      sc.family.offset_fraction = f.value("offset_fraction", 0.25);
    }
  }
  if (!doc.contains("cover")) return sc;
  const json& c = doc.at("cover");
  const double capacity = c.at("capacity").get<double>();
  sc.embedding.eta = c.value("eta", 0.1);
  sc.embedding.allow_overflow = c.value("allow_overflow", false);
  const auto type = c.at("type").get<std::string>();
  if (type == "disks") {
    std::vector<DiskEmbedding> sets;
    for (const auto& p : c.at("centers"))
      sets.push_back(make_disk(sc.surface, {p[0].get<double>(), p[1].get<double>()}, capacity, sc.embedding));
    if (!certify_covering(sc.surface, sets, 1.0 - sc.embedding.eta).covered)
      throw Error("inner disks do not cover the surface");
    sc.discrete = make_discrete_cover(sc.surface, std::move(sets));
  } else if (type == "lattice") {
    sc.discrete = lattice_torus_cover(sc.surface, capacity, sc.embedding, c.value("max_k", 16));
  } else if (type == "three_disk") {
    sc.discrete = three_disk_torus_cover(sc.surface, capacity, sc.embedding);
  } else if (type == "caps") {
    const auto e = c.value("euler", std::vector<double>{0.0, 0.0, 0.0});
    sc.discrete = symmetric_cap_cover(sc.surface, c.at("count").get<int>(), capacity,
                                      euler_rotation(e[0], e[1], e[2]), sc.embedding);
  } else {
    CenterPath path;
    if (c.contains("preset")) {
      path = two_row_path(sc.surface);
    } else {
      for (const auto& p : c.at("vertices")) path.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
      path.closed = c.value("closed", true);
    }
    sc.continuous = make_continuous_cover(sc.surface, path, capacity, c.at("samples").get<int>(), sc.embedding);
  }
  return sc;
}

PbOptions pb_options(const RunConfig& config) {
  PbOptions o;
  o.threads = config.threads;
  if (config.seed) o.seed = *config.seed;
  if (!config.document.contains("pb")) return o;
  const json& p = config.document.at("pb");
  o.method = pb_method_from_string(p.value("method", "auto"));
  o.restarts = p.value("restarts", 32);
  o.exact_limit = p.value("exact_limit", std::size_t{16});
  o.bracket.order = p.value("order", 2);
  o.bracket.polar = p.value("polar", "strict") == "mask" ? PolarPolicy::Mask : PolarPolicy::Strict;
  o.prune = p.value("prune", true);
  return o;
}

OptimizerConfig optimizer_config(const RunConfig& config) {
  OptimizerConfig o;
  if (config.seed) o.seed = *config.seed;
  if (!config.document.contains("optimizer")) return o;
  const json& p = config.document.at("optimizer");
  o.restarts = p.value("restarts", 8);
  o.evaluations = p.value("evaluations", 500);
  o.initial_step = p.value("initial_step", 0.2);
  o.tolerance = p.value("tolerance", 1e-10);
  return o;
}

// ---------------------------------------------------------------------------
// Output.

void write_bracket_heatmap(std::ostream& out, const BracketMatrixField& field, const PbReport& report) {
  const auto& s = field.surface();
  const std::size_t n = field.dimension();
  out << "i,j,x,y,bracket\n";
  out.precision(17);
  for (int j = 0; j < s.grid().ny; ++j)
    for (int i = 0; i < s.grid().nx; ++i) {
      const auto x = s.index(i, j);
      double au = 0, av = 0, bu = 0, bv = 0;
      if (report.a.size() == n && report.b.size() == n) {
        const auto u = field.u(x), v = field.v(x);
        for (std::size_t k = 0; k < n; ++k) {
          au += report.a[k] * u[k], av += report.a[k] * v[k];
          bu += report.b[k] * u[k], bv += report.b[k] * v[k];
        }
      }
      out << i << ',' << j << ',' << s.x(i) << ',' << s.y(j) << ',' << (au * bv - av * bu) << '\n';
    }
}

namespace {

class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
    out << content;
    files_.push_back({{"path", name}, {"fnv1a64", hex64(fnv1a64(content))}, {"bytes", content.size()}});
    paths_.push_back(dir_ / name);
  }
  const json& files() const { return files_; }
  const std::vector<std::filesystem::path>& paths() const { return paths_; }

 private:
  std::filesystem::path dir_;
  json files_ = json::array();
  std::vector<std::filesystem::path> paths_;
};

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json report_json(const PbReport& r) {
  return {{"value", r.value},
          {"method", to_string(r.method)},
          {"dimension", r.dimension},
          {"argmax", r.argmax},
          {"point", point_json(r.point)},
          {"a", r.a},
          {"b", r.b},
          {"restarts", r.restarts},
          {"evaluated_points", r.evaluated_points},
          {"zero_certificate", r.zero_certificate}};
}

json partition_json(const Partition& p) {
  const auto v = verify_partition(p);
  return {{"kind", p.kind == PartitionKind::Discrete ? "discrete" : "continuous"},
          {"members", p.size()},
          {"max_deviation", v.max_deviation},
          {"min_value", v.min_value},
          {"supports_ok", v.supports_ok}};
}

json consistency_json(const ConsistencyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"id", c.id}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"margin", c.margin}, {"pass", c.pass}});
  return {{"all_pass", r.all_pass()}, {"checks", checks}};
}

std::string csv_string(const std::function<void(std::ostream&)>& f) {
  std::ostringstream out;
  f(out);
  return out.str();
}

int run_kind(const RunConfig& config, Artifacts& files, json& result) {
  const json& doc = config.document;
  if (config.kind == RunKind::Hilbert) {
    const int d = doc.at("hilbert").at("dimension").get<int>();
    const int max_order = doc.at("hilbert").at("max_order").get<int>();
    json orders = json::array();
    bool ok = true;
    for (int m = 1; m <= max_order; ++m) {
      const auto check = check_measure_preservation(HilbertCurve(d, m));
      ok = ok && check.ok;
      orders.push_back({{"order", m},
                        {"ok", check.ok},
                        {"failing_level", check.failing_level},
                        {"failing_cell", check.failing_cell},
                        {"measure", to_string(check.measure)}});
    }
    result["hilbert"] = {{"dimension", d}, {"convention", HilbertCurve::kConvention}, {"orders", orders},
                         {"all_pass", ok}};
    return ok ? 0 : 2;
  }

  const auto sc = build_scenario(config);
  const auto pb = pb_options(config);
  result["surface"] = {{"kind", to_string(sc.surface.kind())},
                       {"area", sc.surface.area()},
                       {"grid", {sc.surface.grid().nx, sc.surface.grid().ny}},
                       {"pole_band", sc.surface.pole_band()}};

  switch (config.kind) {
    case RunKind::PbEval: {
      const auto partition = sc.partition();
      const BracketMatrixField field(partition, pb.bracket);
      const auto report = pb_of_bracket_field(field, pb);
      result["partition"] = partition_json(partition);
      result["pb"] = report_json(report);
      files.write("bracket_heatmap.csv", csv_string([&](std::ostream& o) { write_bracket_heatmap(o, field, report); }));
      return 0;
    }
    case RunKind::Minimize: {
      const PartitionFamily family(*sc.discrete, sc.family);
      const auto r = minimize_pb(family, optimizer_config(config), pb);
      const auto partition = family(r.theta);
      const BracketMatrixField field(partition, pb.bracket);
      result["partition"] = partition_json(partition);
      result["pb"] = report_json(r.report);
      result["minimize"] = {{"theta", r.theta},
                            {"canonical_value", r.canonical_value},
                            {"evaluations", r.evaluations},
                            {"lower", family.lower()},
                            {"upper", family.upper()}};
      files.write("bracket_heatmap.csv",
                  csv_string([&](std::ostream& o) { write_bracket_heatmap(o, field, r.report); }));
      return 0;
    }
    case RunKind::Sweep: {
      const json& s = doc.at("sweep");
      const auto caps = s.at("capacities").get<std::vector<double>>();
      const auto table = pb_curve_sweep(sc.surface, caps, sc.family, optimizer_config(config), pb, sc.embedding,
                                        s.value("extra_templates", 2));
      const auto violations = monotonicity_report(table, s.value("tolerance", 0.05));
      json rows = json::array();
      for (const auto& r : table.rows)
        rows.push_back({{"capacity", r.capacity},
                        {"value", r.value},
                        {"canonical_value", r.canonical_value},
                        {"evaluations", r.evaluations},
                        {"cover", r.cover},
                        {"theta", r.theta}});
      result["sweep"] = {{"rows", rows}, {"monotonicity_violations", violations}};
      files.write("sweep.csv", csv_string([&](std::ostream& o) { write_sweep_csv(o, table); }));
      files.write("sweep.dat", csv_string([&](std::ostream& o) { write_sweep_dat(o, table); }));
      return 0;
    }
    case RunKind::Check: {
      const json& c = doc.at("check");
      const auto name = c.at("name").get<std::string>();
      const std::uint64_t seed = *config.seed;
      ConsistencyReport report;
      if (name == "polterovich") {
        if (!sc.discrete) throw Error("the polterovich check needs a finite cover");
        report = polterovich_consistency(*sc.discrete, canonical_partition(*sc.discrete, sc.profile), pb);
      } else if (name == "reduction") {
        ReductionConfig rc;
        rc.curve_order = c.value("curve_order", 2);
        rc.capacity = c.value("capacity", 0.3);
        rc.bicover_cells = c.value("bicover_cells", 32);
        rc.inner_samples = c.value("inner_samples", 16);
        rc.weight_draws = c.value("weight_draws", 32);
        rc.tolerance = c.value("tolerance", 1e-9);
        rc.seed = seed;
        report = reduction_check(sc.surface, rc, pb);
      } else if (name == "coarse_graining") {
        if (!sc.discrete) throw Error("the coarse-graining check needs a finite cover");
        report = coarse_graining_check(*sc.discrete, c.value("cells_per_third", 1), seed, pb);
      } else {
        if (!sc.discrete) throw Error("the restriction check needs a finite cover");
        report = restriction_check(*sc.discrete, c.at("larger_capacity").get<double>(), pb);
      }
      result["check"] = consistency_json(report);
      result["check"]["name"] = name;
      files.write("report.csv", csv_string([&](std::ostream& o) { write_report_csv(o, report); }));
      return report.all_pass() ? 0 : 2;
    }
    case RunKind::Hilbert: break;
  }
  return 0;
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  Artifacts files(config.out);
  const auto config_dump = config.document.dump();
  json result = {{"schema_version", kSchemaVersion},
                 {"version", kVersion},
                 {"kind", to_string(config.kind)},
                 {"config_hash", hex64(fnv1a64(config_dump))}};
  if (config.seed) result["seed"] = *config.seed;
  try {
    outcome.exit_code = run_kind(config, files, result);
  } catch (const Error& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
    result["error"] = e.what();
  }
  result["exit_code"] = outcome.exit_code;
  try {
    files.write("result.json", result.dump(2) + "\n");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"schema_version", kSchemaVersion},
                     {"version", kVersion},
                     {"config", config.document},
                     {"config_hash", hex64(fnv1a64(config_dump))},
                     {"seed", config.seed ? json(*config.seed) : json(nullptr)},
                     {"threads", config.threads},
                     {"wall_time_seconds", seconds},
                     {"files", files.files()}};
    std::filesystem::create_directories(config.out);
    std::ofstream(config.out / "manifest.json") << manifest.dump(2) << "\n";
    outcome.files = files.paths();
    outcome.files.push_back(config.out / "manifest.json");
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
  }
  if (outcome.exit_code == 2 && outcome.message.empty()) outcome.message = "consistency check failed";
  return outcome;
}

}  // namespace pbcover
