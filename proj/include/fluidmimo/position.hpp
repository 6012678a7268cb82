// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fluidmimo/runtime.hpp"

namespace fluidmimo {

// Ascent direction for one user's phase-difference matrix `d_mat` (n x L):
// row m of the result is
//   -(4 pi / lambda) sum_q |d(m,q)| sin(arg d(m,q) + (2 pi / lambda) <dir_q, p_m>) dir_q.
// Both array sides use this with their own d_mat and directions.
arma::mat position_gradient(const arma::cx_mat& d_mat, const arma::mat& positions,
                            const arma::mat& dirs, double lambda_m);

// Elementwise projection onto [lo, hi].
arma::mat clip_box(const arma::mat& p, const arma::mat& lo, const arma::mat& hi);

struct TxRoundReport {
  int inner_steps = 0;    // surrogate steps actually taken
  double delta = 0.0;     // last smoothness constant used
  bool skipped = false;   // degenerate curvature, positions untouched
};

struct RxRoundReport {
  int users_moved = 0;
};

// Transmit-side minorize-maximize round over the fabric. Factors that do
// not depend on positions are exchanged once; the gradient, the smoothness
// constant and the projected step repeat inner_mm_iters times.
TxRoundReport update_tx_positions(DbpRuntime& rt);

// Receive-side rounds are local to the central unit, one user at a time.
RxRoundReport update_rx_positions(DbpRuntime& rt);
// Single-user step, exposed so separability can be checked directly.
// Returns false when the user's curvature is degenerate (no move).
bool update_rx_positions_user(DbpRuntime& rt, int k);

// Same code path as the rounds, without stepping: the decentralized
// gradient stacked across clusters, and the reduced smoothness constant.
arma::mat decentralized_tx_gradient(DbpRuntime& rt);
double decentralized_tx_delta(DbpRuntime& rt);
arma::mat rx_gradient(DbpRuntime& rt, int k);
double rx_delta(DbpRuntime& rt, int k);

}  // namespace fluidmimo
