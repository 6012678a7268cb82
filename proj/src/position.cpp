// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/position.hpp"

#include <cmath>
#include <vector>

#include "fluidmimo/channel.hpp"

namespace fluidmimo {

namespace {

constexpr double kDeltaFloor = 1e-18;

// Factors of the transmit-side surrogate that stay fixed while the
// positions move: the desired-link row factor (weights folded in), the
// interference kernel with its spectral norm, beam Gram blocks and the
// per-user sums of beam row norms.
struct TxFactors {
  std::vector<arma::cx_mat> lin;                   // per user, d x L_tx
  std::vector<arma::cx_mat> j_mat;                 // per user, L_tx x L_tx
  arma::vec jnorm;                                 // K spectral norms
  std::vector<std::vector<arma::cx_mat>> wtilde;   // K x K, d x d
  arma::vec rowsum;                                // K sums of beam row norms
};

TxFactors tx_round_factors(DbpRuntime& rt) {
  const int K = rt.users();
  TxFactors f;

  auto wt = rt.fabric.mul_round("tx", "tx.wtilde", K * K, [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    std::vector<arma::cx_mat> out(static_cast<size_t>(K * K));
    for (int t = 0; t < K; ++t)
      for (int s = 0; s < K; ++s) {
        const auto b = static_cast<size_t>(t * K + s);
        out[b] = du.beam[static_cast<size_t>(t)].t() * du.beam[static_cast<size_t>(s)];
        du.ops.add("tx", du.beam[static_cast<size_t>(t)].n_elem * out[b].n_cols);
      }
    return out;
  });
  f.wtilde.assign(static_cast<size_t>(K), std::vector<arma::cx_mat>(static_cast<size_t>(K)));
  for (int t = 0; t < K; ++t)
    for (int s = 0; s < K; ++s) {
      f.wtilde[static_cast<size_t>(t)][static_cast<size_t>(s)] = wt[static_cast<size_t>(t * K + s)];
      rt.fabric.broadcast_mat("tx", "tx.wtilde", f.wtilde[static_cast<size_t>(t)][static_cast<size_t>(s)]);
    }

  if (rt.local_rowsum) {
    f.rowsum.reset();  // clusters fall back to their own row sums
  } else {
    f.rowsum = rt.fabric.reduce_vec_sum("tx", "tx.rowsum", K, [&](int c) {
      DuState& du = rt.dus[static_cast<size_t>(c)];
      arma::vec local(static_cast<arma::uword>(K));
      for (int t = 0; t < K; ++t) {
        double acc = 0.0;
        const arma::cx_mat& w = du.beam[static_cast<size_t>(t)];
        for (arma::uword m = 0; m < w.n_rows; ++m) acc += arma::norm(w.row(m), 2);
        du.ops.add("tx", w.n_elem);
        local(static_cast<arma::uword>(t)) = acc;
      }
      return local;
    });
    rt.fabric.broadcast_vec("tx", "tx.rowsum", f.rowsum);
  }

  f.lin.resize(static_cast<size_t>(K));
  f.j_mat.resize(static_cast<size_t>(K));
  f.jnorm.set_size(static_cast<arma::uword>(K));
  rt.fabric.cu_phase("tx", [&] {
    const arma::uword d = static_cast<arma::uword>(rt.streams());
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      const double alpha = rt.scenario->weights(static_cast<arma::uword>(k));
      const arma::cx_mat ek = rt.cu.rx_frm[ku].t() * rt.scenario->paths.sigma[ku];  // N x L_tx
      const arma::cx_mat eg =
          arma::eye<arma::cx_mat>(d, d) + 0.5 * (rt.cu.aux.gamma[ku] + rt.cu.aux.gamma[ku].t());
      const arma::cx_mat pe = rt.cu.aux.phi[ku].t() * ek;  // d x L_tx
      f.lin[ku] = std::sqrt(alpha) * eg * pe;
      f.j_mat[ku] = pe.t() * eg * pe;
      f.jnorm(static_cast<arma::uword>(k)) = arma::norm(f.j_mat[ku], 2);
    }
  });
  for (int k = 0; k < K; ++k) rt.fabric.broadcast_mat("tx", "tx.lin", f.lin[static_cast<size_t>(k)]);
  rt.fabric.broadcast_vec("tx", "tx.jnorm", f.jnorm);
  return f;
}

// V_kj = gtilde_kj^H J_k, refreshed whenever the aggregates are.
std::vector<std::vector<arma::cx_mat>> tx_cross_factors(DbpRuntime& rt, const TxFactors& f) {
  const int K = rt.users();
  std::vector<std::vector<arma::cx_mat>> v(static_cast<size_t>(K),
                                           std::vector<arma::cx_mat>(static_cast<size_t>(K)));
  rt.fabric.cu_phase("tx", [&] {
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < K; ++j)
        v[static_cast<size_t>(k)][static_cast<size_t>(j)] =
            rt.cu.links.gtilde[static_cast<size_t>(k)][static_cast<size_t>(j)].t() *
            f.j_mat[static_cast<size_t>(k)];
  });
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j)
      rt.fabric.broadcast_mat("tx", "tx.vfactor", v[static_cast<size_t>(k)][static_cast<size_t>(j)]);
  return v;
}

// Fills every cluster's gradient and local smoothness candidate, then
// reduces the global constant. The constant does not depend on the
// positions, only on the beams and the fixed factors.
double tx_grad_and_delta(DbpRuntime& rt, const TxFactors& f,
                         const std::vector<std::vector<arma::cx_mat>>& v) {
  const int K = rt.users();
  const double lam = rt.lambda();
  const int l_tx = rt.scenario->config.paths_tx;
  const double delta_coeff = 24.0 * kPi * kPi / (lam * lam);

  double delta = rt.fabric.reduce_max("tx", "tx.delta", [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    du.grad.zeros();
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      arma::cx_mat d_mat = du.beam[ku] * f.lin[ku];
      du.ops.add("tx", du.beam[ku].n_elem * f.lin[ku].n_cols);
      for (int j = 0; j < K; ++j) {
        d_mat -= du.beam[static_cast<size_t>(j)] * v[ku][static_cast<size_t>(j)];
        du.ops.add("tx", du.beam[static_cast<size_t>(j)].n_elem * v[ku][static_cast<size_t>(j)].n_cols);
      }
      du.grad += position_gradient(d_mat, du.positions, rt.tx_dirs[ku], lam);
      du.ops.add("tx", 5ull * d_mat.n_elem);
    }

    arma::vec rowsum = f.rowsum;
    if (rowsum.empty()) {
      rowsum.zeros(static_cast<arma::uword>(K));
      for (int t = 0; t < K; ++t) {
        const arma::cx_mat& w = du.beam[static_cast<size_t>(t)];
        for (arma::uword m = 0; m < w.n_rows; ++m)
          rowsum(static_cast<arma::uword>(t)) += arma::norm(w.row(m), 2);
      }
    }
    double cand = 0.0;
    const arma::uword rows = du.positions.n_rows;
    for (arma::uword m = 0; m < rows; ++m) {
      double axis = 0.0;
      for (int t = 0; t < K; ++t)
        axis += arma::norm(du.beam[static_cast<size_t>(t)].row(m), 2) * rowsum(static_cast<arma::uword>(t));
      for (int t = 0; t < K; ++t)
        for (int s = 0; s < K; ++s) {
          const arma::cx_mat& wt = f.wtilde[static_cast<size_t>(t)][static_cast<size_t>(s)];
          axis += arma::as_scalar(
                      arma::real(du.beam[static_cast<size_t>(t)].row(m) * wt *
                                 du.beam[static_cast<size_t>(s)].row(m).t()));
        }
      double dm = 0.0;
      for (int k = 0; k < K; ++k) {
        const auto ku = static_cast<size_t>(k);
        dm += l_tx * axis * f.jnorm(static_cast<arma::uword>(k)) +
              std::sqrt(static_cast<double>(l_tx)) *
                  arma::norm(du.beam[ku].row(m) * f.lin[ku], 2);
      }
      cand = std::max(cand, delta_coeff * dm);
    }
    du.ops.add("tx", rows * static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(K) *
                         static_cast<std::uint64_t>(rt.streams()) * static_cast<std::uint64_t>(rt.streams() + l_tx));
    du.delta_cand = cand;
    return cand;
  });
  rt.fabric.broadcast_scalar("tx", "tx.delta");
  return delta;
}

// Receive-side factors for one user, fixed while that user's antennas move.
struct RxFactors {
  arma::cx_mat p1;   // N x L_rx desired-link term, weight folded in
  arma::cx_mat p2;   // N x N
  arma::cx_mat j2;   // L_rx x L_rx interference kernel
  double delta = 0.0;
};

RxFactors rx_factors(const DbpRuntime& rt, int k) {
  const auto ku = static_cast<size_t>(k);
  const double alpha = rt.scenario->weights(static_cast<arma::uword>(k));
  const double lam = rt.lambda();
  const int l_rx = rt.scenario->config.paths_rx;
  const arma::uword d = static_cast<arma::uword>(rt.streams());
  const arma::cx_mat& sigma = rt.scenario->paths.sigma[ku];
  const arma::cx_mat eg =
      arma::eye<arma::cx_mat>(d, d) + 0.5 * (rt.cu.aux.gamma[ku] + rt.cu.aux.gamma[ku].t());
  const arma::cx_mat phi_eg = rt.cu.aux.phi[ku] * eg;  // N x d

  RxFactors f;
  f.p1 = std::sqrt(alpha) * phi_eg * rt.cu.links.gtilde[ku][ku].t() * sigma.t();
  f.p2 = phi_eg * rt.cu.aux.phi[ku].t();
  arma::cx_mat inner(sigma.n_cols, sigma.n_cols, arma::fill::zeros);
  for (const auto& g : rt.cu.links.gtilde[ku]) inner += g * g.t();
  f.j2 = sigma * inner * sigma.t();
  const double jn = arma::norm(f.j2, 2);

  const double coeff = 24.0 * kPi * kPi / (lam * lam);
  const double root_n = std::sqrt(static_cast<double>(f.p2.n_rows));
  double best = 0.0;
  for (arma::uword n = 0; n < f.p2.n_rows; ++n) {
    const arma::cx_rowvec row = f.p2.row(n);
    const double l1 = arma::accu(arma::abs(row));
    const double l2 = arma::norm(row, 2);
    const double tail = arma::norm(f.p1.row(n), 2) / std::sqrt(static_cast<double>(l_rx));
    best = std::max(best, coeff * l_rx * ((l1 + root_n * l2) * jn + tail));
  }
  f.delta = best;
  return f;
}

arma::mat rx_gradient_at(const DbpRuntime& rt, int k, const RxFactors& f, const arma::mat& pos) {
  const auto ku = static_cast<size_t>(k);
  const arma::cx_mat frm = field_response_block(pos, rt.rx_dirs[ku], rt.lambda());
  const arma::cx_mat d_mat = f.p1 - f.p2 * (frm.t() * f.j2);
  return position_gradient(d_mat, pos, rt.rx_dirs[ku], rt.lambda());
}

}  // namespace

arma::mat position_gradient(const arma::cx_mat& d_mat, const arma::mat& positions,
                            const arma::mat& dirs, double lambda_m) {
  const double wave = 2.0 * kPi / lambda_m;
  arma::mat grad(positions.n_rows, 3, arma::fill::zeros);
  for (arma::uword m = 0; m < positions.n_rows; ++m) {
    const arma::vec3 p = positions.row(m).t();
    for (arma::uword q = 0; q < dirs.n_cols; ++q) {
      const arma::vec3 g = dirs.col(q);
      const cx val = d_mat(m, q);
      const double xi = std::arg(val) + wave * arma::dot(g, p);
      const double w = -2.0 * wave * std::abs(val) * std::sin(xi);
      grad(m, 0) += w * g(0);
      grad(m, 1) += w * g(1);
      grad(m, 2) += w * g(2);
    }
  }
  return grad;
}

arma::mat clip_box(const arma::mat& p, const arma::mat& lo, const arma::mat& hi) {
  return arma::min(arma::max(p, lo), hi);
}

TxRoundReport update_tx_positions(DbpRuntime& rt) {
  TxRoundReport report;
  TxFactors f = tx_round_factors(rt);

  for (int inner = 0; inner < rt.inner_mm_iters; ++inner) {
    if (inner == 0 || rt.refresh_gtilde_inner) refresh_gtilde(rt, "tx", "tx.gtilde");
    auto v = tx_cross_factors(rt, f);
    const double delta = tx_grad_and_delta(rt, f, v);
    report.delta = delta;
    if (delta <= kDeltaFloor) {
      report.skipped = report.inner_steps == 0;
      break;
    }
    rt.fabric.du_phase("tx", [&](int c) {
      DuState& du = rt.dus[static_cast<size_t>(c)];
      du.positions = clip_box(du.positions + du.grad / delta, du.region_lo, du.region_hi);
      du.ops.add("tx", 2ull * du.grad.n_elem);
      for (int k = 0; k < rt.users(); ++k) {
        const auto ku = static_cast<size_t>(k);
        du.tx_frm[ku] = field_response_block(du.positions, rt.tx_dirs[ku], rt.lambda());
        du.ops.add("tx", 4ull * du.tx_frm[ku].n_elem);
      }
    });
    ++report.inner_steps;
  }
  return report;
}

bool update_rx_positions_user(DbpRuntime& rt, int k) {
  const auto ku = static_cast<size_t>(k);
  RxFactors f = rx_factors(rt, k);
  if (f.delta <= kDeltaFloor) return false;
  for (int inner = 0; inner < rt.inner_mm_iters; ++inner) {
    const arma::mat grad = rx_gradient_at(rt, k, f, rt.cu.rx_positions[ku]);
    rt.cu.rx_positions[ku] =
        clip_box(rt.cu.rx_positions[ku] + grad / f.delta, rt.cu.rx_lo[ku], rt.cu.rx_hi[ku]);
  }
  refresh_rx_frm(rt, k);
  return true;
}

RxRoundReport update_rx_positions(DbpRuntime& rt) {
  RxRoundReport report;
  rt.fabric.cu_phase("rx", [&] {
    for (int k = 0; k < rt.users(); ++k)
      if (update_rx_positions_user(rt, k)) ++report.users_moved;
    refresh_links_htilde(rt);
  });
  return report;
}

arma::mat decentralized_tx_gradient(DbpRuntime& rt) {
  TxFactors f = tx_round_factors(rt);
  auto v = tx_cross_factors(rt, f);
  tx_grad_and_delta(rt, f, v);
  arma::mat g(static_cast<arma::uword>(rt.scenario->config.tx_antennas), 3);
  for (const DuState& du : rt.dus)
    g.rows(static_cast<arma::uword>(du.row_offset),
           static_cast<arma::uword>(du.row_offset) + du.grad.n_rows - 1) = du.grad;
  return g;
}

double decentralized_tx_delta(DbpRuntime& rt) {
  TxFactors f = tx_round_factors(rt);
  auto v = tx_cross_factors(rt, f);
  return tx_grad_and_delta(rt, f, v);
}

arma::mat rx_gradient(DbpRuntime& rt, int k) {
  RxFactors f = rx_factors(rt, k);
  return rx_gradient_at(rt, k, f, rt.cu.rx_positions[static_cast<size_t>(k)]);
}

double rx_delta(DbpRuntime& rt, int k) { return rx_factors(rt, k).delta; }

}  // namespace fluidmimo
