// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fluidmimo/config.hpp"
#include "fluidmimo/harness.hpp"

namespace {

void print_error_record(const std::string& kind, const std::string& message) {
  // Keep the record single-line and parseable even without a JSON library
  // on the consumer side.
  std::string escaped;
  for (char ch : message) {
    if (ch == '"' || ch == '\\') escaped += '\\';
    if (ch == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped += ch;
  }
  std::cerr << "{\"error\":\"" << kind << "\",\"message\":\"" << escaped << "\"}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized weighted-sum-rate solver for fluid-antenna MIMO downlink"};

  std::string config_path, mode_word, scheduler_word = "seq", out_dir = "out";
  int antennas = -1, clusters = -1, realizations = -1, max_iters = -1;
  double pmax_dbm = 0.0, tol = -1.0;
  bool have_pmax = false;
  std::uint64_t seed = 0;
  bool have_seed = false;
  bool emit_convergence = false, cost_report = false;

  app.add_option("--config", config_path, "configuration file (key = value lines)");
  app.add_option("--mode", mode_word, "antenna mode: fpa or trfa")
      ->check(CLI::IsMember({"fpa", "trfa"}));
  app.add_option("--antennas", antennas, "total transmit antennas M");
  app.add_option("--clusters", clusters, "cluster count C (divides M)");
  app.add_option("--pmax-dbm", pmax_dbm, "transmit power budget in dBm")
      ->each([&](const std::string&) { have_pmax = true; });
  app.add_option("--seed", seed, "master seed")->each([&](const std::string&) { have_seed = true; });
  app.add_option("--realizations", realizations, "channel realizations S");
  app.add_option("--out", out_dir, "output directory (results.csv, traces/, transcript/)");
  app.add_flag("--emit-convergence", emit_convergence, "write per-run convergence traces");
  app.add_flag("--cost-report", cost_report, "time both schedulers and print a cost summary");
  app.add_option("--scheduler", scheduler_word, "cluster scheduler: seq or par")
      ->check(CLI::IsMember({"seq", "par"}));
  app.add_option("--max-iters", max_iters, "outer iteration cap");
  app.add_option("--tol", tol, "relative convergence tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    print_error_record("cli", e.what());
    return e.get_exit_code();
  }

  try {
    fluidmimo::SystemConfig cfg =
        config_path.empty() ? fluidmimo::SystemConfig{} : fluidmimo::parse_config_file(config_path);
    if (!mode_word.empty()) cfg.mode = fluidmimo::parse_mode(mode_word);
    if (antennas > 0) cfg.tx_antennas = antennas;
    if (clusters > 0) cfg.clusters = clusters;
    if (have_pmax) cfg.pmax_dbm = pmax_dbm;
    if (have_seed) cfg.seed = seed;
    if (realizations > 0) cfg.realizations = realizations;
    cfg.validate();

    fluidmimo::ExperimentSpec spec;
    spec.base = cfg;
    spec.cells.push_back({cfg.tx_antennas, cfg.clusters, cfg.pmax_dbm, cfg.mode});
    spec.realizations = cfg.realizations;
    spec.master_seed = cfg.seed;
    spec.out_dir = out_dir;
    spec.emit_convergence = emit_convergence;
    spec.cost_report = cost_report;
    spec.solve.scheduler = scheduler_word == "par" ? fluidmimo::SchedulerKind::kParallel
                                                   : fluidmimo::SchedulerKind::kSequential;
    if (max_iters > 0) spec.solve.max_outer_iters = max_iters;
    if (tol > 0.0) spec.solve.rel_tol = tol;

    const auto rows = fluidmimo::run_experiment(spec);
    std::cout << fluidmimo::results_csv_text(rows);
    if (cost_report) std::cout << "\n" << fluidmimo::cost_report_text(rows);
    for (const auto& row : rows)
      if (row.failures > 0) {
        print_error_record("realization", row.cell + ": " + std::to_string(row.failures) +
                                              " of " + std::to_string(spec.realizations) +
                                              " realizations failed");
        return 2;
      }
  } catch (const std::exception& e) {
    print_error_record("run", e.what());
    return 1;
  }
  return 0;
}
