#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "emdec/driver.hpp"
#include "emdec/kernels.hpp"

int main(int argc, char** argv) {
  if (const char* env = std::getenv("EMDEC_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 0) {
      std::cerr << "EMDEC_THREADS must be a non-negative integer\n";
      return emdec::kExitConfig;
    }
    emdec::kernels::set_threads(static_cast<int>(n));
  }

  CLI::App app{"emdec: discrete exterior calculus Maxwell solver"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a configured simulation");
  std::string config_path, out_dir, seed;
  bool print_config = false;
  run->add_option("--config", config_path, "INI config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run->add_option("--seed", seed, "rng seed (overrides run.seed)");
  run->add_flag("--print-config", print_config, "print the resolved config and exit");

  auto* validate = app.add_subcommand("validate-mesh", "check a mesh file");
  std::string mesh_path;
  validate->add_option("file", mesh_path, "mesh file")->required();

  auto* list = app.add_subcommand("list-scenarios", "list initial-condition scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : emdec::kExitConfig;
  }

  if (*run) return emdec::cmd_run_file(config_path, out_dir, seed, print_config, std::cout, std::cerr);
  if (*validate) return emdec::cmd_validate_mesh(mesh_path, std::cout, std::cerr);
  if (*list) return emdec::cmd_list_scenarios(std::cout);
  return emdec::kExitOther;
}
