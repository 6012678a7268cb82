// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fluidmimo/runtime.hpp"

namespace fluidmimo {

struct SolveOptions {
  int max_outer_iters = 200;
  double rel_tol = 1e-4;
  int inner_mm_iters = 5;
  bool use_extrapolation = true;
  SchedulerKind scheduler = SchedulerKind::kSequential;
  bool refresh_gtilde_inner = true;   // re-aggregate before every inner position step
  bool local_rowsum = false;          // cluster-local row-norm sums in the step constant
  bool record_transcript = false;     // keep per-message records (totals are always kept)
  int transcript_record_iters = 3;    // stop recording individual messages after this many
  std::function<void(const DbpRuntime&, int)> iteration_hook;  // called after each iteration

  void validate() const;
};

struct SolveResult {
  std::vector<double> wsr_trace_bps_hz;  // entry 0 is the initial point
  int iterations = 0;
  bool converged = false;
  int degenerate_w_skips = 0;
  double wall_ms = 0.0;

  std::vector<arma::cx_mat> beams;       // per user, M x d
  arma::mat tx_positions;                // M x 3
  std::vector<arma::mat> rx_positions;   // per user, N x 3
  AuxiliaryState aux;

  std::uint64_t total_bytes = 0;
  std::uint64_t total_messages = 0;
  std::vector<std::uint64_t> bytes_per_iteration;
  std::map<std::string, double> phase_ms;
  std::vector<std::map<std::string, std::uint64_t>> du_phase_ops;  // per cluster
  std::uint64_t total_ops = 0;
  std::uint64_t max_du_ops = 0;
  std::vector<MessageRecord> transcript;  // nonempty when recording was on
};

// Relative change of the last two trace entries against the newest value,
// guarded for an all-zero trace.
bool check_convergence(const std::vector<double>& trace, double rel_tol);

// One full block-coordinate iteration (1-based counter): auxiliary
// variables, beamformers, then both position sides in the movable mode.
// Returns the weighted sum rate (nats) at the end of the iteration.
double bca_iteration(DbpRuntime& rt, int iteration, const SolveOptions& options);

SolveResult run_bca(const Scenario& scenario, const SolveOptions& options);

}  // namespace fluidmimo
