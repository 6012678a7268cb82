// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "fluidmimo/beamformer.hpp"
#include "fluidmimo/position.hpp"

namespace fluidmimo {

void SolveOptions::validate() const {
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be positive");
  if (rel_tol <= 0.0) throw std::invalid_argument("rel_tol must be positive");
  if (inner_mm_iters < 1) throw std::invalid_argument("inner_mm_iters must be positive");
  if (transcript_record_iters < 0) throw std::invalid_argument("transcript_record_iters < 0");
}

bool check_convergence(const std::vector<double>& trace, double rel_tol) {
  if (trace.size() < 2) return false;
  const double last = trace[trace.size() - 1];
  const double prev = trace[trace.size() - 2];
  return std::abs(last - prev) / std::max(last, 1e-30) < rel_tol;
}

double bca_iteration(DbpRuntime& rt, int iteration, const SolveOptions& options) {
  rt.iteration = iteration;
  const bool movable = rt.scenario->config.mode == AntennaMode::kTrfa;

  update_aux(rt);
  update_w_round(rt, iteration, options.use_extrapolation);
  if (movable) {
    update_tx_positions(rt);
    refresh_gtilde(rt, "rx", "rx.gtilde");
    update_rx_positions(rt);
  } else {
    refresh_gtilde(rt, "rate", "rate.gtilde");
  }

  double wsr = 0.0;
  rt.fabric.cu_phase("rate", [&] { wsr = current_wsr_nats(rt); });
  return wsr;
}

SolveResult run_bca(const Scenario& scenario, const SolveOptions& options) {
  options.validate();
  const auto t0 = std::chrono::steady_clock::now();

  DbpRuntime rt(scenario, options.scheduler);
  rt.inner_mm_iters = options.inner_mm_iters;
  rt.refresh_gtilde_inner = options.refresh_gtilde_inner;
  rt.local_rowsum = options.local_rowsum;
  rt.fabric.transcript().record_messages = options.record_transcript;
  if (!options.record_transcript) rt.fabric.transcript().messages.clear();

  SolveResult res;
  const double to_bits = 1.0 / std::log(2.0);
  double wsr0 = 0.0;
  rt.fabric.cu_phase("rate", [&] { wsr0 = current_wsr_nats(rt); });
  res.wsr_trace_bps_hz.push_back(wsr0 * to_bits);

  std::uint64_t bytes_mark = rt.fabric.transcript().total_bytes;
  for (int i = 1; i <= options.max_outer_iters; ++i) {
    const double wsr = bca_iteration(rt, i, options);
    res.wsr_trace_bps_hz.push_back(wsr * to_bits);
    const std::uint64_t now_bytes = rt.fabric.transcript().total_bytes;
    res.bytes_per_iteration.push_back(now_bytes - bytes_mark);
    bytes_mark = now_bytes;
    res.iterations = i;
    if (options.record_transcript && i >= options.transcript_record_iters)
      rt.fabric.transcript().record_messages = false;
    if (options.iteration_hook) options.iteration_hook(rt, i);
    if (check_convergence(res.wsr_trace_bps_hz, options.rel_tol)) {
      res.converged = true;
      break;
    }
  }

  res.degenerate_w_skips = rt.degenerate_w_skips;
  res.beams.resize(static_cast<size_t>(rt.users()));
  for (int k = 0; k < rt.users(); ++k) res.beams[static_cast<size_t>(k)] = stacked_beam(rt, k);
  res.tx_positions = stacked_tx_positions(rt);
  res.rx_positions = rt.cu.rx_positions;
  res.aux = rt.cu.aux;

  const Transcript& tr = rt.fabric.transcript();
  res.total_bytes = tr.total_bytes;
  res.total_messages = tr.total_messages;
  res.phase_ms = tr.phase_ms;
  res.transcript = tr.messages;
  res.du_phase_ops.resize(rt.dus.size());
  for (size_t c = 0; c < rt.dus.size(); ++c) {
    res.du_phase_ops[c] = rt.dus[c].ops.by_phase;
    res.total_ops += rt.dus[c].ops.total;
    res.max_du_ops = std::max(res.max_du_ops, rt.dus[c].ops.total);
  }
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace fluidmimo
