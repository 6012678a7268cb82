// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/runtime.hpp"

#include <algorithm>
#include <stdexcept>

#include "fluidmimo/channel.hpp"

namespace fluidmimo {

namespace {

FabricTopology make_topology(const Scenario& sc) {
  FabricTopology topo;
  topo.clusters = sc.config.clusters;
  topo.total_rows = sc.config.tx_antennas;
  std::vector<int> dims = {1, sc.config.streams, sc.config.rx_antennas, sc.config.num_users,
                           sc.config.paths_tx, sc.config.paths_rx};
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  topo.allowed_dims = dims;
  return topo;
}

}  // namespace

DbpRuntime::DbpRuntime(const Scenario& sc, SchedulerKind kind)
    : scenario(&sc), fabric(make_topology(sc), kind) {
  const auto& cfg = sc.config;
  const int K = cfg.num_users;
  const int C = cfg.clusters;
  const int mc = cfg.tx_antennas / C;
  const int d = cfg.streams;

  tx_dirs.resize(static_cast<size_t>(K));
  rx_dirs.resize(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<size_t>(k);
    tx_dirs[ku] = steering_dirs(sc.paths.theta_tx[ku], sc.paths.phi_tx[ku]);
    rx_dirs[ku] = steering_dirs(sc.paths.theta_rx[ku], sc.paths.phi_rx[ku]);
  }

  dus.resize(static_cast<size_t>(C));
  for (int c = 0; c < C; ++c) {
    DuState& du = dus[static_cast<size_t>(c)];
    du.id = c;
    du.row_offset = c * mc;
    const arma::uword r0 = static_cast<arma::uword>(du.row_offset);
    const arma::uword r1 = r0 + static_cast<arma::uword>(mc) - 1;
    du.positions = sc.tx_init.rows(r0, r1);
    du.region_lo = sc.regions.tx_lo.rows(r0, r1);
    du.region_hi = sc.regions.tx_hi.rows(r0, r1);
    du.beam.resize(static_cast<size_t>(K));
    du.beam_prev.resize(static_cast<size_t>(K));
    du.tx_frm.resize(static_cast<size_t>(K));
    du.upsilon.assign(static_cast<size_t>(K),
                      arma::cx_mat(static_cast<arma::uword>(mc), static_cast<arma::uword>(d),
                                   arma::fill::zeros));
    du.q = du.upsilon;
    du.grad.zeros(static_cast<arma::uword>(mc), 3);
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      du.beam[ku] = sc.w_init[ku].rows(r0, r1);
      du.beam_prev[ku] = du.beam[ku];
    }
  }

  cu.rx_positions = sc.rx_init;
  cu.rx_lo = sc.regions.rx_lo;
  cu.rx_hi = sc.regions.rx_hi;
  cu.rx_frm.resize(static_cast<size_t>(K));
  cu.aux.gamma.assign(static_cast<size_t>(K),
                      arma::cx_mat(static_cast<arma::uword>(d), static_cast<arma::uword>(d),
                                   arma::fill::zeros));
  cu.aux.phi.assign(static_cast<size_t>(K),
                    arma::cx_mat(static_cast<arma::uword>(cfg.rx_antennas),
                                 static_cast<arma::uword>(d), arma::fill::zeros));
  cu.links.gtilde.assign(static_cast<size_t>(K), std::vector<arma::cx_mat>(static_cast<size_t>(K)));
  cu.links.htilde = cu.links.gtilde;

  refresh_local_frms(*this, "setup");
  fabric.cu_phase("setup", [&] {
    for (int k = 0; k < K; ++k) refresh_rx_frm(*this, k);
  });
  refresh_gtilde(*this, "aux", "aux.gtilde");
}

void refresh_local_frms(DbpRuntime& rt, const std::string& phase) {
  const double lam = rt.lambda();
  rt.fabric.du_phase(phase, [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    for (int k = 0; k < rt.users(); ++k) {
      const auto ku = static_cast<size_t>(k);
      du.tx_frm[ku] = field_response_block(du.positions, rt.tx_dirs[ku], lam);
      du.ops.add(phase, 4ull * du.tx_frm[ku].n_elem);
    }
  });
}

void refresh_rx_frm(DbpRuntime& rt, int k) {
  const auto ku = static_cast<size_t>(k);
  rt.cu.rx_frm[ku] = field_response_block(rt.cu.rx_positions[ku], rt.rx_dirs[ku], rt.lambda());
}

void refresh_links_htilde(DbpRuntime& rt) {
  const int K = rt.users();
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<size_t>(k);
    const arma::cx_mat ek = rt.cu.rx_frm[ku].t() * rt.scenario->paths.sigma[ku];
    for (int j = 0; j < K; ++j)
      rt.cu.links.htilde[ku][static_cast<size_t>(j)] = ek * rt.cu.links.gtilde[ku][static_cast<size_t>(j)];
  }
}

void refresh_gtilde(DbpRuntime& rt, const std::string& phase, const std::string& tag) {
  const int K = rt.users();
  auto blocks = rt.fabric.mul_round(phase, tag, K * K, [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    std::vector<arma::cx_mat> out(static_cast<size_t>(K * K));
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < K; ++j) {
        const arma::cx_mat& g = du.tx_frm[static_cast<size_t>(k)];
        const arma::cx_mat& w = du.beam[static_cast<size_t>(j)];
        out[static_cast<size_t>(k * K + j)] = g * w;
        du.ops.add(phase, static_cast<std::uint64_t>(g.n_rows) * g.n_cols * w.n_cols);
      }
    }
    return out;
  });
  rt.fabric.cu_phase(phase, [&] {
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < K; ++j)
        rt.cu.links.gtilde[static_cast<size_t>(k)][static_cast<size_t>(j)] =
            blocks[static_cast<size_t>(k * K + j)];
    refresh_links_htilde(rt);
  });
}

void update_aux(DbpRuntime& rt) {
  rt.fabric.cu_phase("aux", [&] {
    const double noise = rt.scenario->noise_w;
    for (int k = 0; k < rt.users(); ++k) {
      const auto ku = static_cast<size_t>(k);
      rt.cu.aux.gamma[ku] = update_gamma(k, rt.cu.links, noise);
      rt.cu.aux.phi[ku] =
          update_phi(k, rt.cu.links, rt.scenario->weights(static_cast<arma::uword>(k)), noise);
    }
  });
}

double current_wsr_nats(DbpRuntime& rt) {
  return weighted_sum_rate_nats(rt.cu.links, rt.scenario->weights, rt.scenario->noise_w);
}

double current_f_quad(DbpRuntime& rt) {
  return f_quad(rt.cu.links, rt.cu.aux, rt.scenario->weights, rt.scenario->noise_w);
}

arma::mat stacked_tx_positions(const DbpRuntime& rt) {
  arma::mat t(static_cast<arma::uword>(rt.scenario->config.tx_antennas), 3);
  for (const DuState& du : rt.dus)
    t.rows(static_cast<arma::uword>(du.row_offset),
           static_cast<arma::uword>(du.row_offset) + du.positions.n_rows - 1) = du.positions;
  return t;
}

arma::cx_mat stacked_beam(const DbpRuntime& rt, int k) {
  const auto ku = static_cast<size_t>(k);
  arma::cx_mat w(static_cast<arma::uword>(rt.scenario->config.tx_antennas),
                 static_cast<arma::uword>(rt.streams()));
  for (const DuState& du : rt.dus)
    w.rows(static_cast<arma::uword>(du.row_offset),
           static_cast<arma::uword>(du.row_offset) + du.beam[ku].n_rows - 1) = du.beam[ku];
  return w;
}

void set_stacked_beam(DbpRuntime& rt, int k, const arma::cx_mat& w) {
  if (w.n_rows != static_cast<arma::uword>(rt.scenario->config.tx_antennas) ||
      w.n_cols != static_cast<arma::uword>(rt.streams()))
    throw std::invalid_argument("set_stacked_beam: wrong shape");
  const auto ku = static_cast<size_t>(k);
  for (DuState& du : rt.dus)
    du.beam[ku] = w.rows(static_cast<arma::uword>(du.row_offset),
                         static_cast<arma::uword>(du.row_offset) + du.beam[ku].n_rows - 1);
}

void set_stacked_tx_positions(DbpRuntime& rt, const arma::mat& t) {
  if (t.n_rows != static_cast<arma::uword>(rt.scenario->config.tx_antennas) || t.n_cols != 3)
    throw std::invalid_argument("set_stacked_tx_positions: wrong shape");
  for (DuState& du : rt.dus)
    du.positions = t.rows(static_cast<arma::uword>(du.row_offset),
                          static_cast<arma::uword>(du.row_offset) + du.positions.n_rows - 1);
}

}  // namespace fluidmimo
