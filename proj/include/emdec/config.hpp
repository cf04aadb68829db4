#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emdec/avi.hpp"
#include "emdec/em_fields.hpp"

namespace emdec {

/// Axis-aligned box with its own material values. Edges and faces whose
/// circumcentres fall inside take epsilon and mu from the last matching box.
struct MaterialRegion {
  Point lo{0.0, 0.0, 0.0};
  Point hi{0.0, 0.0, 0.0};
  double epsilon = 1.0;
  double mu = 1.0;
};

struct RunConfig {
  // [mesh]
  std::string mesh_type = "rect";  // rect | jittered | file
  int dimension = 2;
  std::vector<Index> cells{16, 16};
  std::vector<double> size{1.0, 1.0};
  double jitter = 0.15;
  std::string mesh_file;

  // [materials]
  double epsilon = 1.0;
  double mu = 1.0;
  std::vector<MaterialRegion> regions;

  // [integrator]
  std::string integrator = "uniform";  // uniform | avi
  double dt = 0.0;                     // 0: use cfl_fraction
  double cfl_fraction = 0.5;
  bool stability_guard = true;
  double guard_fraction = 0.95;
  std::string policy = "uniform";  // avi: uniform | per-face-cfl | random
  double safety = 0.5;
  double random_min = 0.5;
  double random_max = 1.0;
  bool random_relative = true;

  // [scenario]
  std::string scenario = "cavity-mode";
  std::vector<int> modes{1, 1};
  double amplitude = 1.0;
  double charge = 1.0;
  double omega = 3.0;
  double charge_scale = 1.0;
  Index dipole_edge = -1;

  // [run]
  std::int64_t steps = 100;  // uniform
  double duration = 0.0;     // avi; for uniform a positive value overrides steps
  std::int64_t cadence = 10;
  double sample_interval = 0.0;  // avi; 0: ten times the mean face step
  std::uint64_t seed = 7;
  std::vector<Point> probes;

  // [output]
  std::string out_dir = "out";

  // [tolerances]
  double continuity_tolerance = kDefaultContinuityTolerance;
};

/// Strict INI parser: unknown sections or keys, duplicates, malformed values
/// and range violations throw ConfigError naming the key and line.
/// Relative mesh paths resolve against `base_dir`.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
RunConfig parse_config_file(const std::string& path);

/// Fully resolved config in the same INI form (readable by parse_config).
void write_config(std::ostream& out, const RunConfig& config);

}  // namespace emdec
