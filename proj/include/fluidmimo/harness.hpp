// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fluidmimo/scenario.hpp"
#include "fluidmimo/solver.hpp"

namespace fluidmimo {

// One experiment cell: array size, partitioning, power budget, antenna mode.
struct ExperimentCell {
  int tx_antennas = 64;
  int clusters = 4;
  double pmax_dbm = 20.0;
  AntennaMode mode = AntennaMode::kTrfa;
};

struct ExperimentSpec {
  SystemConfig base;                 // everything a cell does not override
  std::vector<ExperimentCell> cells;
  int realizations = 20;
  std::uint64_t master_seed = 1;
  std::string out_dir;               // empty: no files are written
  bool emit_convergence = false;     // write traces/<cell>/runNNN.jsonl
  bool cost_report = false;          // also time the parallel scheduler
  SolveOptions solve;

  void validate() const;
};

struct ResultRow {
  std::string cell;
  int tx_antennas = 0;
  int clusters = 0;
  double pmax_dbm = 0.0;
  std::string mode;
  double mean_wsr_bps_hz = 0.0;
  double std_wsr = 0.0;
  double mean_iters = 0.0;
  std::uint64_t bytes_per_iter = 0;
  std::uint64_t du_ops_max = 0;      // busiest cluster, summed over the cell's runs
  std::uint64_t total_ops = 0;       // all clusters, all runs
  double wall_seq_ms = 0.0;
  double wall_par_ms = 0.0;

  // Extra context for the cost report; not part of the csv schema.
  std::map<std::string, std::uint64_t> du_phase_ops_max;
  int failures = 0;
  std::vector<std::string> failure_messages;
  double region_side_m = 0.0;
  double region_gap_m = 0.0;
};

std::string cell_id(const ExperimentCell& cell);

// Runs every cell for `realizations` seeded instances (seed_s = master ^ s),
// aggregates, and writes results.csv, traces/ and transcript/ under out_dir
// when one is given. A failed realization is recorded on its row and the
// sweep continues.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::string results_csv_text(const std::vector<ResultRow>& rows);

// Plain-text cost summary: dominant per-cluster phase, op scaling with the
// cluster share, byte totals and scheduler wall-time ratios (labelled as
// hardware-dependent), plus the movable-region geometry in effect.
std::string cost_report_text(const std::vector<ResultRow>& rows);

}  // namespace fluidmimo
