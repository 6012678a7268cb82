// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fluidmimo {

namespace {
constexpr double kEtaFloor = 1e-30;
}

double extrapolation_weight(int iteration) {
  return std::max((iteration - 2.0) / (iteration + 1.0), 0.0);
}

double projection_scale(double pmax_w, double p_q) {
  if (p_q <= 0.0) return 1.0;
  return std::min(std::sqrt(pmax_w / p_q), 1.0);
}

WRoundResult update_w_round(DbpRuntime& rt, int iteration, bool use_extrapolation) {
  WRoundResult res;
  const int K = rt.users();
  const double nu = use_extrapolation ? extrapolation_weight(iteration) : 0.0;
  const arma::vec& alpha = rt.scenario->weights;

  // Array-size independent factors, derived once at the CU. a_fac carries
  // the eigen-split of I + Gamma through the receive side; u_fac is the
  // matched linear factor reused by the candidate assembly.
  std::vector<arma::cx_mat> a_fac(static_cast<size_t>(K)), u_fac(static_cast<size_t>(K));
  std::vector<arma::cx_mat> e_herm(static_cast<size_t>(K));
  rt.fabric.cu_phase("w", [&] {
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      const arma::uword d = static_cast<arma::uword>(rt.streams());
      arma::cx_mat eg = arma::eye<arma::cx_mat>(d, d) + 0.5 * (rt.cu.aux.gamma[ku] + rt.cu.aux.gamma[ku].t());
      arma::vec evals;
      arma::cx_mat evecs;
      arma::eig_sym(evals, evecs, eg);
      evals.transform([](double v) { return v < 0.0 ? 0.0 : v; });
      arma::cx_mat split = evecs * arma::diagmat(arma::sqrt(evals));
      e_herm[ku] = rt.scenario->paths.sigma[ku].t() * rt.cu.rx_frm[ku];  // L_tx x N
      a_fac[ku] = e_herm[ku] * (rt.cu.aux.phi[ku] * split);
      u_fac[ku] = e_herm[ku] * (rt.cu.aux.phi[ku] * eg);
    }
  });
  for (int k = 0; k < K; ++k) rt.fabric.broadcast_mat("w", "w.evd", a_fac[static_cast<size_t>(k)]);

  // Curvature scale from per-cluster Gram blocks.
  auto ptilde = rt.fabric.mul_round("w", "w.ptilde", K * K, [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    std::vector<arma::cx_mat> p(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      p[ku] = du.tx_frm[ku].t() * a_fac[ku];
      du.ops.add("w", du.tx_frm[ku].n_elem * a_fac[ku].n_cols);
    }
    std::vector<arma::cx_mat> out(static_cast<size_t>(K * K));
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < K; ++j) {
        const auto b = static_cast<size_t>(k * K + j);
        out[b] = p[static_cast<size_t>(k)].t() * p[static_cast<size_t>(j)];
        du.ops.add("w", p[static_cast<size_t>(k)].n_elem * out[b].n_cols);
      }
    return out;
  });
  double eta = 0.0;
  rt.fabric.cu_phase("w", [&] {
    double acc = 0.0;
    for (const auto& b : ptilde) acc += std::pow(arma::norm(b, "fro"), 2);
    eta = std::sqrt(acc);
  });
  rt.fabric.broadcast_scalar("w", "w.eta");
  res.eta = eta;
  if (eta < kEtaFloor) {
    res.skipped = true;
    ++rt.degenerate_w_skips;
    return res;
  }
  const double inv_eta = 1.0 / eta;

  // Momentum extrapolation at the clusters, then its receive-side images.
  rt.fabric.du_phase("w", [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      du.upsilon[ku] = du.beam[ku] + nu * (du.beam[ku] - du.beam_prev[ku]);
      du.ops.add("w", du.upsilon[ku].n_elem);
    }
  });
  auto y_sum = rt.fabric.mul_round("w", "w.upsilon", K * K, [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    std::vector<arma::cx_mat> out(static_cast<size_t>(K * K));
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k) {
        const auto b = static_cast<size_t>(j * K + k);
        out[b] = du.tx_frm[static_cast<size_t>(j)] * du.upsilon[static_cast<size_t>(k)];
        du.ops.add("w", du.tx_frm[static_cast<size_t>(j)].n_elem * out[b].n_cols);
      }
    return out;
  });
  std::vector<std::vector<arma::cx_mat>> v_fac(static_cast<size_t>(K),
                                               std::vector<arma::cx_mat>(static_cast<size_t>(K)));
  rt.fabric.cu_phase("w", [&] {
    for (int j = 0; j < K; ++j) {
      const auto ju = static_cast<size_t>(j);
      const arma::cx_mat phi_h = rt.cu.aux.phi[ju].t();
      for (int k = 0; k < K; ++k) {
        const arma::cx_mat ups_img = e_herm[ju].t() * y_sum[static_cast<size_t>(j * K + k)];
        v_fac[ju][static_cast<size_t>(k)] = phi_h * ups_img;
      }
    }
  });
  for (int k = 0; k < K; ++k) rt.fabric.broadcast_mat("w", "w.qlin", u_fac[static_cast<size_t>(k)]);
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k)
      rt.fabric.broadcast_mat("w", "w.qcross", v_fac[static_cast<size_t>(j)][static_cast<size_t>(k)]);

  // Candidate assembly and its power, reduced over clusters.
  res.p_q = rt.fabric.reduce_sum("w", "w.pq", [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    std::vector<arma::cx_mat> b(static_cast<size_t>(K));
    for (int j = 0; j < K; ++j) {
      const auto ju = static_cast<size_t>(j);
      b[ju] = du.tx_frm[ju].t() * u_fac[ju];
      du.ops.add("w", du.tx_frm[ju].n_elem * u_fac[ju].n_cols);
    }
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      arma::cx_mat cross(b[0].n_rows, b[0].n_cols, arma::fill::zeros);
      for (int j = 0; j < K; ++j) {
        cross += b[static_cast<size_t>(j)] * v_fac[static_cast<size_t>(j)][ku];
        du.ops.add("w", b[static_cast<size_t>(j)].n_elem * v_fac[static_cast<size_t>(j)][ku].n_cols);
      }
      du.q[ku] = inv_eta * std::sqrt(alpha(static_cast<arma::uword>(k))) * b[ku] -
                 inv_eta * cross + du.upsilon[ku];
      du.ops.add("w", 2ull * du.q[ku].n_elem);
      acc += std::pow(arma::norm(du.q[ku], "fro"), 2);
      du.ops.add("w", du.q[ku].n_elem);
    }
    return acc;
  });
  rt.fabric.broadcast_scalar("w", "w.scale");
  res.scale = projection_scale(rt.scenario->pmax_w, res.p_q);
  rt.fabric.du_phase("w", [&](int c) {
    DuState& du = rt.dus[static_cast<size_t>(c)];
    const double s = projection_scale(rt.scenario->pmax_w, res.p_q);
    for (int k = 0; k < K; ++k) {
      const auto ku = static_cast<size_t>(k);
      du.beam_prev[ku] = du.beam[ku];
      du.beam[ku] = s * du.q[ku];
      du.ops.add("w", du.q[ku].n_elem);
    }
  });
  return res;
}

}  // namespace fluidmimo
