// Command-line front end. Talks to the simulator only through the C API.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vapordet/vapordet.h"

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutEnv = "VAPORDET_OUT_DIR";

int exit_code(vd_status s) {
  switch (s) {
    case VD_OK: return 0;
    case VD_ERR_CONFIG:
    case VD_ERR_DOMAIN: return 1;
    case VD_ERR_INFEASIBLE: return 3;
    default: return 2;
  }
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "both";
};

int run(const std::string& command, const Options& o) {
  std::ifstream in(o.config, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config '" << o.config << "'\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  vd_run_options opts{};
  opts.has_seed = o.seed.has_value() ? 1 : 0;
  opts.seed = o.seed.value_or(0);
  opts.format = o.format == "json" ? VD_FORMAT_JSON : o.format == "csv" ? VD_FORMAT_CSV : VD_FORMAT_BOTH;
  const std::string base = fs::path(o.config).parent_path().string();
  opts.base_dir = base.empty() ? "." : base.c_str();

  vd_run* r = nullptr;
  const vd_status s = vd_run_command(command.c_str(), text.c_str(), &opts, &r);
  if (s != VD_OK) {
    std::cerr << "error: " << vd_last_error() << '\n';
    vd_run_free(r);
    return exit_code(s);
  }

  fs::path dir = "vapordet-out";
  if (!o.out.empty()) {
    dir = o.out;
  } else if (*vd_run_output_dir(r)) {
    dir = fs::path(vd_run_output_dir(r));
    if (dir.is_relative()) dir = fs::path(opts.base_dir) / dir;
  } else if (const char* env = std::getenv(kOutEnv); env && *env) {
    dir = env;
  }

  std::cout << vd_run_summary(r);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << dir.string() << "': " << ec.message() << '\n';
    vd_run_free(r);
    return 2;
  }
  for (size_t i = 0; i < vd_run_file_count(r); ++i) {
    size_t n = 0;
    const char* data = vd_run_file_data(r, i, &n);
    const fs::path path = dir / vd_run_file_name(r, i);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(data, static_cast<std::streamsize>(n));
    if (!f) {
      std::cerr << "error: cannot write '" << path.string() << "'\n";
      vd_run_free(r);
      return 2;
    }
    std::cerr << "wrote " << path.string() << '\n';
  }
  vd_run_free(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vapordet: atomic-vapor photon-number-resolving detector simulator"};
  app.set_version_flag("--version", vd_version());
  app.require_subcommand(1);
  app.footer(std::string("Output directory: --out, else the config's output_dir (relative to the config file), else $") +
             kOutEnv + ", else ./vapordet-out.\n"
             "Exit status: 0 success, 1 invalid config or arguments, 2 numerical or I/O failure, "
             "3 infeasible optimization.");

  Options o;
  const std::pair<const char*, const char*> commands[] = {
      {"budget", "efficiency budget, dark counts and derived scales"},
      {"dynamics", "single-atom absorption: closed form, numeric solver, optional multimode oracle"},
      {"mc", "Monte Carlo readout statistics and confusion matrix"},
      {"sweep", "Cartesian parameter sweep of budget metrics"},
      {"optimize", "maximize efficiency under a dark-count budget"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "RNG seed, overrides the config's seed");
    sub->add_option("--out", o.out, std::string("output directory (default: $") + kOutEnv + ")");
    sub->add_option("--format", o.format, "output files: json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  return run(app.get_subcommands().front()->get_name(), o);
}
