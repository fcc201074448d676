// volcrit: batch driver for the verification and demonstration scenarios.
//
//   volcrit --config scenario.json [--out report.json] [--threads k] [--seed s] [--quad-order k]
//
// Exit status: 0 when every check passes, 1 on a failed check or a numerical
// failure, 2 on a configuration or domain error.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "report.hpp"
#include "version.hpp"
#include "volcrit/errors.hpp"
#include "volcrit/parallel.hpp"

namespace {

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw volcrit::cli::ConfigError("--out: cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace volcrit;
  using namespace volcrit::cli;

  CLI::App app{"Volume-functional verification driver"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path, out_path;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> quad_order;
  app.add_option("--config", config_path, "Scenario file (JSON)")->required();
  app.add_option("--out", out_path, "Report path; overrides the config's output");
  app.add_option("--threads", threads, "Worker threads for quadrature")->check(CLI::Range(1, 256));
  app.add_option("--seed", seed, "Seed for random sample points");
  app.add_option("--quad-order", quad_order,
                 "Ball quadrature: 2k radial nodes, angular degree k")
      ->check(CLI::Range(2, 200));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ScenarioConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (seed) cfg.seed = *seed;
  if (quad_order) {
    cfg.quadrature = {2 * *quad_order, *quad_order};
    cfg.quadrature_given = true;
  }
  if (!out_path.empty()) cfg.output = out_path;
  set_thread_count(threads);

  Report rep(cfg.command);
  const auto start = std::chrono::steady_clock::now();
  try {
    run_command(cfg, rep);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const nlohmann::json report = rep.to_json(config_echo(cfg));
  try {
    if (cfg.output.empty()) {
      std::cout << report.dump(2) << '\n';
    } else {
      write_json(cfg.output, report);
      write_json(cfg.output + ".timing.json",
                 {{"command", cfg.command}, {"wall_seconds", seconds}, {"threads", threads}});
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  for (const CheckEntry& c : rep.checks())
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
              << "  tol=" << c.tolerance << '\n';
  if (!rep.pass()) {
    std::cerr << "failing checks:\n";
    for (const CheckEntry& c : rep.checks())
      if (!c.pass) std::cerr << "  " << c.name << " (error " << c.error << ", tolerance " << c.tolerance << ")\n";
    return 1;
  }
  return 0;
}
