#pragma once

#include <iosfwd>
#include <string>

#include "emdec/config.hpp"
#include "emdec/mesh.hpp"

namespace emdec {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitValidation = 3,
  kExitBlowup = 4,
};

/// Builds the mesh described by the config (rect, jittered or file).
MeshComplex build_mesh(const RunConfig& config);

/// Uniform materials overridden per region.
MaterialField build_materials(const MeshComplex& mesh, const RunConfig& config);

/// Runs a configured simulation and writes trace.csv, fields.txt and
/// run-manifest into config.out_dir. Progress and errors go to `log`.
int cmd_run(const RunConfig& config, std::ostream& log);

/// Parses the config file first, mapping parse errors to kExitConfig.
int cmd_run_file(const std::string& path, const std::string& out_dir_override, const std::string& seed_override,
                 bool print_config, std::ostream& out, std::ostream& log);

/// Reads a mesh file and prints the validation report. 0 when valid, 3 when
/// the report lists issues or the file does not assemble.
int cmd_validate_mesh(const std::string& path, std::ostream& out, std::ostream& log);

/// Scenario names, one per line, alphabetical.
int cmd_list_scenarios(std::ostream& out);

}  // namespace emdec
