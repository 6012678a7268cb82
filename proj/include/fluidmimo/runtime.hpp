// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fluidmimo/common.hpp"
#include "fluidmimo/fabric.hpp"
#include "fluidmimo/objective.hpp"
#include "fluidmimo/scenario.hpp"

namespace fluidmimo {

// Per-cluster state. Everything here scales with the cluster's antenna
// share M_c, never with the full array.
struct DuState {
  int id = 0;
  int row_offset = 0;                    // first global antenna row
  arma::mat positions;                   // M_c x 3
  arma::mat region_lo, region_hi;        // M_c x 3 elementwise bounds
  std::vector<arma::cx_mat> beam;        // per user, M_c x d (current iterate)
  std::vector<arma::cx_mat> beam_prev;   // previous iterate, for extrapolation
  std::vector<arma::cx_mat> tx_frm;      // per user, L_tx x M_c field responses
  std::vector<arma::cx_mat> upsilon;     // per user, M_c x d scratch
  std::vector<arma::cx_mat> q;           // per user, M_c x d scratch
  arma::mat grad;                        // M_c x 3 scratch
  double delta_cand = 0.0;               // local smoothness candidate
  OpCounter ops;
};

// Central-unit state: user-side geometry and the aggregated quantities the
// algorithm actually iterates on. No member grows with the array size.
struct CuState {
  std::vector<arma::mat> rx_positions;   // per user, N x 3
  std::vector<arma::mat> rx_lo, rx_hi;
  std::vector<arma::cx_mat> rx_frm;      // per user, L_rx x N
  AuxiliaryState aux;
  EffectiveLinks links;
};

// One solver instance wired onto the message fabric.
struct DbpRuntime {
  DbpRuntime(const Scenario& scenario, SchedulerKind kind);

  DbpRuntime(const DbpRuntime&) = delete;
  DbpRuntime& operator=(const DbpRuntime&) = delete;
  DbpRuntime(DbpRuntime&&) = default;

  const Scenario* scenario = nullptr;
  Fabric fabric;
  CuState cu;
  std::vector<DuState> dus;
  std::vector<arma::mat> tx_dirs;        // per user, 3 x L_tx propagation directions
  std::vector<arma::mat> rx_dirs;        // per user, 3 x L_rx
  int iteration = 0;                     // outer iteration, shared knowledge
  int inner_mm_iters = 5;
  bool refresh_gtilde_inner = true;
  bool local_rowsum = false;
  int degenerate_w_skips = 0;

  int users() const { return scenario->config.num_users; }
  int streams() const { return scenario->config.streams; }
  double lambda() const { return scenario->lambda_m; }
};

// Recomputes every cluster's local field-response matrices from its current
// positions. Runs as a DU phase.
void refresh_local_frms(DbpRuntime& rt, const std::string& phase);

// One aggregation round: gtilde[k][j] = sum_c G_k^c W_j^c over the fabric,
// then htilde derived at the CU from the current receive matrices.
void refresh_gtilde(DbpRuntime& rt, const std::string& phase, const std::string& tag);

// Re-derives htilde from the stored gtilde (after receive-side moves).
void refresh_links_htilde(DbpRuntime& rt);

void refresh_rx_frm(DbpRuntime& rt, int k);

// Closed-form auxiliary update for every user, at the CU.
void update_aux(DbpRuntime& rt);

double current_wsr_nats(DbpRuntime& rt);
double current_f_quad(DbpRuntime& rt);

// Cross-cluster views, for inspection and tests.
arma::mat stacked_tx_positions(const DbpRuntime& rt);
arma::cx_mat stacked_beam(const DbpRuntime& rt, int k);
void set_stacked_beam(DbpRuntime& rt, int k, const arma::cx_mat& w);
void set_stacked_tx_positions(DbpRuntime& rt, const arma::mat& t);

}  // namespace fluidmimo
