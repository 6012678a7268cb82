// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fluidmimo/common.hpp"

namespace fluidmimo {

// Auxiliary variables of the sum-rate surrogate, one pair per user,
// held at the central unit.
struct AuxiliaryState {
  std::vector<arma::cx_mat> gamma;  // d x d, Hermitian PSD
  std::vector<arma::cx_mat> phi;    // N x d
};

// Aggregated per-link quantities whose sizes do not grow with the array:
// gtilde[k][j] = sum_c G_k^c W_j^c (L_k x d) and the effective channels
// htilde[k][j] = F_k^H Sigma_k gtilde[k][j] (N x d).
struct EffectiveLinks {
  std::vector<std::vector<arma::cx_mat>> gtilde;
  std::vector<std::vector<arma::cx_mat>> htilde;

  int users() const { return static_cast<int>(htilde.size()); }
};

// M_k = sum_{j != k} htilde_kj htilde_kj^H + noise_w I. Throws if
// noise_w <= 0.
arma::cx_mat interference_matrix(int k, const EffectiveLinks& links, double noise_w);

// ln det(I + htilde_kk^H M_k^{-1} htilde_kk), in nats.
double user_rate_nats(int k, const EffectiveLinks& links, const arma::cx_mat& m_k);

double wsr_nats(const arma::vec& rates, const arma::vec& weights);

// Convenience: rates for all users from links, then the weighted sum.
double weighted_sum_rate_nats(const EffectiveLinks& links, const arma::vec& weights,
                              double noise_w);

// Quadratic-transform surrogate value (natural log). Sum of per-user terms;
// the per-user term is exposed for separability checks.
double f_quad_term(int k, const EffectiveLinks& links, const AuxiliaryState& aux,
                   const arma::vec& weights, double noise_w);
double f_quad(const EffectiveLinks& links, const AuxiliaryState& aux, const arma::vec& weights,
              double noise_w);

// Closed-form coordinate maximizers of the surrogate, evaluated at the
// previous iterates held in `links`. Gamma is symmetrized on return.
arma::cx_mat update_gamma(int k, const EffectiveLinks& links, double noise_w);
arma::cx_mat update_phi(int k, const EffectiveLinks& links, double alpha_k, double noise_w);

}  // namespace fluidmimo
