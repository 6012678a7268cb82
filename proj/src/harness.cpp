// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fluidmimo {

namespace fs = std::filesystem;

namespace {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string run_name(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run%03d", s);
  return buf;
}

void write_trace(const fs::path& path, const std::vector<double>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (size_t i = 0; i < trace.size(); ++i)
    out << "{\"iteration\":" << i << ",\"wsr_bps_hz\":" << format_real(trace[i]) << "}\n";
}

}  // namespace

void ExperimentSpec::validate() const {
  if (realizations < 1) throw std::invalid_argument("experiment needs at least one realization");
  if (cells.empty()) throw std::invalid_argument("experiment needs at least one cell");
  for (const auto& cell : cells) {
    if (cell.clusters < 1 || cell.tx_antennas < 1 || cell.tx_antennas % cell.clusters != 0)
      throw std::invalid_argument("cell " + cell_id(cell) + ": clusters must divide the antenna count");
  }
  solve.validate();
}

std::string cell_id(const ExperimentCell& cell) {
  std::ostringstream id;
  id << "M" << cell.tx_antennas << "_C" << cell.clusters << "_P" << format_real(cell.pmax_dbm)
     << "_" << (cell.mode == AntennaMode::kFpa ? "fpa" : "trfa");
  return id.str();
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const bool writing = !spec.out_dir.empty();
  fs::path out_root(spec.out_dir);
  if (writing) {
    fs::create_directories(out_root);
    if (spec.emit_convergence) fs::create_directories(out_root / "traces");
    fs::create_directories(out_root / "transcript");
  }

  std::vector<ResultRow> rows;
  for (const auto& cell : spec.cells) {
    ResultRow row;
    row.cell = cell_id(cell);
    row.tx_antennas = cell.tx_antennas;
    row.clusters = cell.clusters;
    row.pmax_dbm = cell.pmax_dbm;
    row.mode = cell.mode == AntennaMode::kFpa ? "fpa" : "trfa";

    SystemConfig cfg = spec.base;
    cfg.tx_antennas = cell.tx_antennas;
    cfg.clusters = cell.clusters;
    cfg.pmax_dbm = cell.pmax_dbm;
    cfg.mode = cell.mode;
    cfg.realizations = spec.realizations;
    row.region_side_m = cfg.region_side_m < 0.0 ? cfg.wavelength() : cfg.region_side_m;
    row.region_gap_m = cfg.region_gap_m < 0.0 ? cfg.wavelength() / 2.0 : cfg.region_gap_m;

    if (writing && spec.emit_convergence) fs::create_directories(out_root / "traces" / row.cell);

    std::vector<double> finals, iters;
    std::vector<std::uint64_t> du_totals;  // indexed by cluster, summed over runs
    bool have_bytes = false;
    for (int s = 0; s < spec.realizations; ++s) {
      cfg.seed = spec.master_seed ^ static_cast<std::uint64_t>(s);
      try {
        const Scenario sc = build_scenario(cfg);
        SolveOptions opt = spec.solve;
        opt.record_transcript = writing && s == 0;
        const SolveResult res = run_bca(sc, opt);

        if (opt.scheduler == SchedulerKind::kParallel)
          row.wall_par_ms += res.wall_ms;
        else
          row.wall_seq_ms += res.wall_ms;
        if (spec.cost_report) {
          SolveOptions other = spec.solve;
          other.record_transcript = false;
          other.scheduler = opt.scheduler == SchedulerKind::kParallel ? SchedulerKind::kSequential
                                                                      : SchedulerKind::kParallel;
          const SolveResult timing = run_bca(sc, other);
          if (other.scheduler == SchedulerKind::kParallel)
            row.wall_par_ms += timing.wall_ms;
          else
            row.wall_seq_ms += timing.wall_ms;
        }

        finals.push_back(res.wsr_trace_bps_hz.back());
        iters.push_back(static_cast<double>(res.iterations));
        if (!res.bytes_per_iteration.empty() && !have_bytes) {
          row.bytes_per_iter = res.bytes_per_iteration.front();
          have_bytes = true;
        }
        if (du_totals.size() < res.du_phase_ops.size()) du_totals.resize(res.du_phase_ops.size(), 0);
        for (size_t c = 0; c < res.du_phase_ops.size(); ++c) {
          std::uint64_t t = 0;
          for (const auto& [phase, n] : res.du_phase_ops[c]) {
            t += n;
            auto& cur = row.du_phase_ops_max[phase];
            cur = std::max(cur, n);
          }
          du_totals[c] += t;
          row.total_ops += t;
        }

        if (writing && spec.emit_convergence)
          write_trace(out_root / "traces" / row.cell / (run_name(s) + ".jsonl"),
                      res.wsr_trace_bps_hz);
        if (writing && s == 0) {
          std::ofstream tf(out_root / "transcript" / (row.cell + ".jsonl"));
          if (!tf) throw std::runtime_error("cannot write transcript for " + row.cell);
          export_messages_jsonl(res.transcript, tf);
        }
      } catch (const std::exception& e) {
        ++row.failures;
        row.failure_messages.push_back(run_name(s) + ": " + e.what());
      }
    }

    const auto n = static_cast<double>(finals.size());
    if (n > 0) {
      double mean = 0.0;
      for (double v : finals) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : finals) var += (v - mean) * (v - mean);
      row.mean_wsr_bps_hz = mean;
      row.std_wsr = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      double mi = 0.0;
      for (double v : iters) mi += v;
      row.mean_iters = mi / n;
    }
    for (std::uint64_t t : du_totals) row.du_ops_max = std::max(row.du_ops_max, t);
    rows.push_back(std::move(row));
  }

  if (writing) write_results_csv((out_root / "results.csv").string(), rows);
  return rows;
}

std::string results_csv_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "cell,M,C,pmax_dbm,mode,mean_wsr_bps_hz,std_wsr,mean_iters,bytes_per_iter,du_ops_max,"
         "total_ops,wall_seq_ms,wall_par_ms\n";
  for (const auto& r : rows) {
    out << r.cell << ',' << r.tx_antennas << ',' << r.clusters << ',' << format_real(r.pmax_dbm)
        << ',' << r.mode << ',' << format_real(r.mean_wsr_bps_hz) << ',' << format_real(r.std_wsr)
        << ',' << format_real(r.mean_iters) << ',' << r.bytes_per_iter << ',' << r.du_ops_max
        << ',' << r.total_ops << ',' << format_real(r.wall_seq_ms) << ','
        << format_real(r.wall_par_ms) << '\n';
  }
  return out.str();
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << results_csv_text(rows);
}

std::string cost_report_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "cost report (wall times are hardware-dependent; op counts and bytes are exact)\n";
  for (const auto& r : rows) {
    out << "\n" << r.cell << "\n";
    out << "  movable regions: side " << format_real(r.region_side_m) << " m, gap "
        << format_real(r.region_gap_m) << " m\n";
    out << "  bytes per iteration: " << r.bytes_per_iter << " (independent of M)\n";

    std::string dom = "none";
    std::uint64_t dom_ops = 0;
    for (const auto& [phase, n] : r.du_phase_ops_max)
      if (n > dom_ops) {
        dom = phase;
        dom_ops = n;
      }
    out << "  dominant cluster phase: " << dom << " with " << dom_ops
        << " ops on the busiest cluster (scales with the per-cluster share M_c = M/C)\n";
    const bool has_pos = r.du_phase_ops_max.count("tx") != 0;
    if (r.mode == "fpa" && !has_pos) out << "  position phases: idle (0 ops, fixed arrays)\n";
    out << "  per-cluster total ops (busiest): " << r.du_ops_max << ", all clusters: " << r.total_ops
        << "\n";
    if (r.wall_seq_ms > 0.0 && r.wall_par_ms > 0.0) {
      out << "  wall: sequential " << format_real(r.wall_seq_ms) << " ms, parallel "
          << format_real(r.wall_par_ms) << " ms, seq/par ratio "
          << format_real(r.wall_seq_ms / r.wall_par_ms) << " (hardware-dependent)\n";
    } else {
      out << "  wall: sequential " << format_real(r.wall_seq_ms) << " ms, parallel "
          << format_real(r.wall_par_ms) << " ms\n";
    }
    if (r.failures > 0) {
      out << "  failures: " << r.failures << "\n";
      for (const auto& msg : r.failure_messages) out << "    " << msg << "\n";
    }
  }
  return out.str();
}

}  // namespace fluidmimo
