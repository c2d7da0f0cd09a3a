#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "qpnls/errors.hpp"
#include "qpnls/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qpnls - spectral laboratory for NLS with quasi-periodic data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool have_out = false, have_seed = false;
  int threads = 1;

  const char* names[] = {"simulate", "verify-bounds", "tree-stats",
                         "asymptotics", "render-tree"};
  const char* descs[] = {
      "Picard + RK4 trajectories with decay/Cauchy/uniqueness reports",
      "inequality suite: zeta bound, lattice majorant, branch sums, predicates",
      "branch counts, counting-function samples, branch sums",
      "weak-nonlinearity difference norms and log-log slopes",
      "DOT renderings of the branch trees"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "config file (JSON)")->required();
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& v) { out_dir = v; have_out = true; },
        "output directory override");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed = v; have_seed = true; },
        "seed override");
    sub->add_option("--threads", threads, "worker threads (reserved)")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    qpnls::RunConfig cfg = qpnls::parse_config_file(config_path);
    if (have_out) cfg.out_dir = out_dir;
    if (have_seed) cfg.spec.seed = seed;
    qpnls::RunResult res = qpnls::run_subcommand(sub, cfg);
    for (const std::string& m : res.messages) std::cerr << m << "\n";
    std::cout << "artifacts: " << res.run_dir << "\n";
    return res.exit_code;
  } catch (const qpnls::parse_error& e) {
    std::cerr << "{\"error\":\"parse_error\",\"message\":\"" << e.what() << "\"}\n";
    return 2;
  } catch (const qpnls::capacity_error& e) {
    std::cerr << "{\"error\":\"capacity_error\",\"message\":\"" << e.what() << "\"}\n";
    return 4;
  } catch (const qpnls::divergence_error& e) {
    std::cerr << "{\"error\":\"divergence_error\",\"message\":\"" << e.what() << "\"}\n";
    return 4;
  } catch (const qpnls::error& e) {
    std::cerr << "{\"error\":\"input_error\",\"message\":\"" << e.what() << "\"}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what() << "\"}\n";
    return 3;
  }
}
