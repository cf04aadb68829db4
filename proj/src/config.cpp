#include "emdec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "emdec/error.hpp"

namespace emdec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& what) {
  throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": " + key + ": " + what);
}

double to_double(const std::string& tok, int line, const std::string& key) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
    fail(line, key, "expected a number, got '" + tok + "'");
  return v;
}

std::int64_t to_int(const std::string& tok, int line, const std::string& key) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) fail(line, key, "expected an integer, got '" + tok + "'");
  return v;
}

bool to_bool(const std::string& tok, int line, const std::string& key) {
  if (tok == "true" || tok == "on" || tok == "yes" || tok == "1") return true;
  if (tok == "false" || tok == "off" || tok == "no" || tok == "0") return false;
  fail(line, key, "expected true or false, got '" + tok + "'");
}

std::string one(const std::string& value, int line, const std::string& key) {
  const auto toks = split(value);
  if (toks.size() != 1) fail(line, key, "expected a single value");
  return toks[0];
}

std::string choice(const std::string& value, int line, const std::string& key,
                   std::initializer_list<const char*> allowed) {
  const std::string v = one(value, line, key);
  for (const char* a : allowed)
    if (v == a) return v;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  fail(line, key, "'" + v + "' is not one of " + list);
}

struct Setter {
  std::function<void(RunConfig&, const std::string&, int, const std::string&)> set;
  bool repeatable = false;
};

using Table = std::map<std::string, Setter>;

template <class T>
Setter scalar(T RunConfig::*field) {
  return {[field](RunConfig& c, const std::string& v, int line, const std::string& key) {
    const std::string tok = one(v, line, key);
    if constexpr (std::is_same_v<T, double>) c.*field = to_double(tok, line, key);
    else if constexpr (std::is_same_v<T, bool>) c.*field = to_bool(tok, line, key);
    else if constexpr (std::is_same_v<T, std::uint64_t>) {
      const auto n = to_int(tok, line, key);
      if (n < 0) fail(line, key, "must be >= 0");
      c.*field = static_cast<std::uint64_t>(n);
    } else c.*field = static_cast<T>(to_int(tok, line, key));
  }};
}

const Table& table() {
  static const Table t = [] {
    Table t;
    t["mesh.type"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      c.mesh_type = choice(v, line, key, {"rect", "jittered", "file"});
    }};
    t["mesh.cells"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      const auto toks = split(v);
      if (toks.size() != 2 && toks.size() != 3) fail(line, key, "expected 2 or 3 counts");
      c.cells.clear();
      for (const auto& tok : toks) {
        const auto n = to_int(tok, line, key);
        if (n < 1 || n > 4096) fail(line, key, "counts must lie in [1, 4096]");
        c.cells.push_back(static_cast<Index>(n));
      }
      c.dimension = static_cast<int>(toks.size());
    }};
    t["mesh.size"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      const auto toks = split(v);
      if (toks.size() != 2 && toks.size() != 3) fail(line, key, "expected 2 or 3 extents");
      c.size.clear();
      for (const auto& tok : toks) {
        const double x = to_double(tok, line, key);
        if (!(x > 0.0)) fail(line, key, "extents must be positive");
        c.size.push_back(x);
      }
    }};
    t["mesh.jitter"] = scalar(&RunConfig::jitter);
    t["mesh.file"] = {[](RunConfig& c, const std::string& v, int, const std::string&) { c.mesh_file = trim(v); }};

    t["materials.epsilon"] = scalar(&RunConfig::epsilon);
    t["materials.mu"] = scalar(&RunConfig::mu);
    t["materials.region"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
                               const auto toks = split(v);
                               if (toks.size() != 6 && toks.size() != 8)
                                 fail(line, key, "expected 'x0 y0 x1 y1 eps mu' or 'x0 y0 z0 x1 y1 z1 eps mu'");
                               const std::size_t d = toks.size() == 6 ? 2 : 3;
                               MaterialRegion r;
                               for (std::size_t a = 0; a < d; ++a) {
                                 r.lo[a] = to_double(toks[a], line, key);
                                 r.hi[a] = to_double(toks[d + a], line, key);
                                 if (!(r.lo[a] <= r.hi[a])) fail(line, key, "box corners out of order");
                               }
                               if (d == 2) {
                                 r.lo[2] = -INFINITY;
                                 r.hi[2] = INFINITY;
                               }
                               r.epsilon = to_double(toks[2 * d], line, key);
                               r.mu = to_double(toks[2 * d + 1], line, key);
                               if (!(r.epsilon > 0.0) || !(r.mu > 0.0)) fail(line, key, "materials must be positive");
                               c.regions.push_back(r);
                             },
                             true};

    t["integrator.type"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      c.integrator = choice(v, line, key, {"uniform", "avi"});
    }};
    t["integrator.dt"] = scalar(&RunConfig::dt);
    t["integrator.cfl_fraction"] = scalar(&RunConfig::cfl_fraction);
    t["integrator.stability_guard"] = scalar(&RunConfig::stability_guard);
    t["integrator.guard_fraction"] = scalar(&RunConfig::guard_fraction);
    t["integrator.policy"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      c.policy = choice(v, line, key, {"uniform", "per-face-cfl", "random"});
    }};
    t["integrator.safety"] = scalar(&RunConfig::safety);
    t["integrator.min"] = scalar(&RunConfig::random_min);
    t["integrator.max"] = scalar(&RunConfig::random_max);
    t["integrator.relative"] = scalar(&RunConfig::random_relative);

    t["scenario.name"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      const std::string name = one(v, line, key);
      const auto names = scenario_names();
      if (std::find(names.begin(), names.end(), name) == names.end()) fail(line, key, "unknown scenario '" + name + "'");
      c.scenario = name;
    }};
    t["scenario.modes"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      const auto toks = split(v);
      if (toks.size() != 2 && toks.size() != 3) fail(line, key, "expected 2 or 3 mode indices");
      c.modes.clear();
      for (const auto& tok : toks) {
        const auto n = to_int(tok, line, key);
        if (n < 0 || n > 1000) fail(line, key, "mode indices must lie in [0, 1000]");
        c.modes.push_back(static_cast<int>(n));
      }
    }};
    t["scenario.amplitude"] = scalar(&RunConfig::amplitude);
    t["scenario.charge"] = scalar(&RunConfig::charge);
    t["scenario.omega"] = scalar(&RunConfig::omega);
    t["scenario.charge_scale"] = scalar(&RunConfig::charge_scale);
    t["scenario.dipole_edge"] = scalar(&RunConfig::dipole_edge);

    t["run.steps"] = scalar(&RunConfig::steps);
    t["run.duration"] = scalar(&RunConfig::duration);
    t["run.cadence"] = scalar(&RunConfig::cadence);
    t["run.sample_interval"] = scalar(&RunConfig::sample_interval);
    t["run.seed"] = scalar(&RunConfig::seed);
    t["run.probe"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
                        const auto toks = split(v);
                        if (toks.size() != 2 && toks.size() != 3) fail(line, key, "expected 2 or 3 coordinates");
                        Point p{0.0, 0.0, 0.0};
                        for (std::size_t a = 0; a < toks.size(); ++a) p[a] = to_double(toks[a], line, key);
                        c.probes.push_back(p);
                      },
                      true};

    t["output.dir"] = {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
      c.out_dir = trim(v);
      if (c.out_dir.empty()) fail(line, key, "must not be empty");
    }};
    t["tolerances.continuity"] = scalar(&RunConfig::continuity_tolerance);
    return t;
  }();
  return t;
}

void check_ranges(const RunConfig& c, const std::map<std::string, int>& lines) {
  auto at = [&](const std::string& key) {
    auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto require = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) {
      const int line = at(key);
      if (line > 0) fail(line, key, what);
      throw Error(ErrorKind::ConfigError, key + ": " + what);
    }
  };
  if (c.mesh_type != "file") {
    require(c.size.size() == c.cells.size(), "mesh.size", "needs one extent per cell count");
  }
  if (c.mesh_type == "jittered") require(c.dimension == 2, "mesh.cells", "jittered meshes are 2D");
  require(c.jitter >= 0.0 && c.jitter < 0.5, "mesh.jitter", "must lie in [0, 0.5)");
  if (c.mesh_type == "file") {
    require(!c.mesh_file.empty(), "mesh.file", "required when mesh.type = file");
    require(std::filesystem::is_regular_file(c.mesh_file), "mesh.file", "no such file '" + c.mesh_file + "'");
  }
  require(c.epsilon > 0.0, "materials.epsilon", "must be positive");
  require(c.mu > 0.0, "materials.mu", "must be positive");
  require(c.dt >= 0.0, "integrator.dt", "must be >= 0 (0 selects cfl_fraction)");
  require(c.cfl_fraction > 0.0, "integrator.cfl_fraction", "must be positive");
  require(c.guard_fraction > 0.0 && c.guard_fraction <= 1.0, "integrator.guard_fraction", "must lie in (0, 1]");
  require(c.safety > 0.0, "integrator.safety", "must be positive");
  require(c.random_min > 0.0, "integrator.min", "must be positive");
  require(c.random_min <= c.random_max, "integrator.max", "must be >= integrator.min");
  require(c.amplitude >= 0.0, "scenario.amplitude", "must be >= 0");
  require(c.omega > 0.0, "scenario.omega", "must be positive");
  require(c.dipole_edge >= -1, "scenario.dipole_edge", "must be >= -1");
  require(c.steps >= 0, "run.steps", "must be >= 0");
  require(c.duration >= 0.0, "run.duration", "must be >= 0");
  require(c.cadence >= 0, "run.cadence", "must be >= 0");
  require(c.sample_interval >= 0.0, "run.sample_interval", "must be >= 0");
  require(c.integrator != "avi" || c.duration > 0.0, "run.duration", "required (> 0) for the avi integrator");
  require(c.continuity_tolerance > 0.0, "tolerances.continuity", "must be positive");
  if (c.mesh_type != "file") {
    if (c.scenario == "cavity-mode")
      require(c.modes.size() == static_cast<std::size_t>(c.dimension), "scenario.modes",
              "needs one index per dimension");
  }
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  RunConfig c;
  std::map<std::string, int> lines;
  std::string section;
  std::string raw;
  int line = 0;
  static const std::vector<std::string> sections{"mesh", "materials", "integrator", "scenario",
                                                 "run",  "output",    "tolerances"};
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw;
    const auto hash = text.find_first_of("#;");
    if (hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(line, text, "malformed section header");
      section = trim(text.substr(1, text.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        fail(line, "[" + section + "]", "unknown section");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(line, text, "expected 'key = value'");
    const std::string name = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (section.empty()) fail(line, name, "key outside of any section");
    const std::string key = section + "." + name;
    const auto it = table().find(key);
    if (it == table().end()) fail(line, key, "unknown key");
    if (value.empty()) fail(line, key, "missing value");
    if (!it->second.repeatable && lines.count(key)) fail(line, key, "duplicate key (first set on line " +
                                                                       std::to_string(lines[key]) + ")");
    lines[key] = line;
    it->second.set(c, value, line, key);
  }
  if (!c.mesh_file.empty()) {
    std::filesystem::path p(c.mesh_file);
    if (p.is_relative()) c.mesh_file = (std::filesystem::path(base_dir) / p).lexically_normal().string();
  }
  check_ranges(c, lines);
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(in, parent.empty() ? "." : parent.string());
}

namespace {

// Shortest text that reads back to the same double.
struct Num {
  double v;
};

std::ostream& operator<<(std::ostream& os, Num n) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, n.v);
  return os.write(buf, r.ptr - buf);
}

}  // namespace

void write_config(std::ostream& out, const RunConfig& c) {
  std::ostringstream os;
  auto list = [&](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s << ' ';
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>) s << Num{v[i]};
      else s << v[i];
    }
    return s.str();
  };
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "[mesh]\n"
     << "type = " << c.mesh_type << '\n'
     << "cells = " << list(c.cells) << '\n'
     << "size = " << list(c.size) << '\n'
     << "jitter = " << Num{c.jitter} << '\n';
  if (!c.mesh_file.empty()) os << "file = " << c.mesh_file << '\n';
  os << "\n[materials]\n"
     << "epsilon = " << Num{c.epsilon} << '\n'
     << "mu = " << Num{c.mu} << '\n';
  for (const auto& r : c.regions) {
    const bool flat = std::isinf(r.lo[2]);
    const std::size_t d = flat ? 2 : 3;
    os << "region =";
    for (std::size_t a = 0; a < d; ++a) os << ' ' << Num{r.lo[a]};
    for (std::size_t a = 0; a < d; ++a) os << ' ' << Num{r.hi[a]};
    os << ' ' << Num{r.epsilon} << ' ' << Num{r.mu} << '\n';
  }
  os << "\n[integrator]\n"
     << "type = " << c.integrator << '\n'
     << "dt = " << Num{c.dt} << '\n'
     << "cfl_fraction = " << Num{c.cfl_fraction} << '\n'
     << "stability_guard = " << b(c.stability_guard) << '\n'
     << "guard_fraction = " << Num{c.guard_fraction} << '\n'
     << "policy = " << c.policy << '\n'
     << "safety = " << Num{c.safety} << '\n'
     << "min = " << Num{c.random_min} << '\n'
     << "max = " << Num{c.random_max} << '\n'
     << "relative = " << b(c.random_relative) << '\n'
     << "\n[scenario]\n"
     << "name = " << c.scenario << '\n'
     << "modes = " << list(c.modes) << '\n'
     << "amplitude = " << Num{c.amplitude} << '\n'
     << "charge = " << Num{c.charge} << '\n'
     << "omega = " << Num{c.omega} << '\n'
     << "charge_scale = " << Num{c.charge_scale} << '\n'
     << "dipole_edge = " << c.dipole_edge << '\n'
     << "\n[run]\n"
     << "steps = " << c.steps << '\n'
     << "duration = " << Num{c.duration} << '\n'
     << "cadence = " << c.cadence << '\n'
     << "sample_interval = " << Num{c.sample_interval} << '\n'
     << "seed = " << c.seed << '\n';
  for (const auto& p : c.probes) {
    os << "probe = " << Num{p[0]} << ' ' << Num{p[1]};
    if (c.dimension == 3) os << ' ' << Num{p[2]};
    os << '\n';
  }
  os << "\n[output]\n"
     << "dir = " << c.out_dir << '\n'
     << "\n[tolerances]\n"
     << "continuity = " << Num{c.continuity_tolerance} << '\n';
  out << os.str();
}

}  // namespace emdec
