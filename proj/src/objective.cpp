// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/objective.hpp"

#include <stdexcept>

namespace fluidmimo {

namespace {

arma::cx_mat hermitize(const arma::cx_mat& a) { return 0.5 * (a + a.t()); }

// ln det of a Hermitian positive definite matrix, with a generic fallback
// for borderline-conditioned inputs.
double log_det_hpd(const arma::cx_mat& a) {
  double val = 0.0;
  if (arma::log_det_sympd(val, a)) return val;
  cx ld = arma::log_det(a);
  return ld.real();
}

}  // namespace

arma::cx_mat interference_matrix(int k, const EffectiveLinks& links, double noise_w) {
  if (noise_w <= 0.0) throw std::invalid_argument("interference_matrix: noise power must be > 0");
  const auto& row = links.htilde.at(static_cast<size_t>(k));
  const arma::uword n = row.at(static_cast<size_t>(k)).n_rows;
  arma::cx_mat m(n, n, arma::fill::zeros);
  for (size_t j = 0; j < row.size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    m += row[j] * row[j].t();
  }
  m += noise_w * arma::eye<arma::cx_mat>(n, n);
  return hermitize(m);
}

double user_rate_nats(int k, const EffectiveLinks& links, const arma::cx_mat& m_k) {
  const arma::cx_mat& h = links.htilde.at(static_cast<size_t>(k)).at(static_cast<size_t>(k));
  const arma::uword d = h.n_cols;
  arma::cx_mat s = arma::eye<arma::cx_mat>(d, d) + h.t() * arma::solve(m_k, h);
  return log_det_hpd(hermitize(s));
}

double wsr_nats(const arma::vec& rates, const arma::vec& weights) {
  if (rates.n_elem != weights.n_elem) throw std::invalid_argument("wsr_nats: length mismatch");
  return arma::dot(weights, rates);
}

double weighted_sum_rate_nats(const EffectiveLinks& links, const arma::vec& weights,
                              double noise_w) {
  const int k_users = links.users();
  arma::vec rates(static_cast<arma::uword>(k_users));
  for (int k = 0; k < k_users; ++k) {
    rates(static_cast<arma::uword>(k)) = user_rate_nats(k, links, interference_matrix(k, links, noise_w));
  }
  return wsr_nats(rates, weights);
}

double f_quad_term(int k, const EffectiveLinks& links, const AuxiliaryState& aux,
                   const arma::vec& weights, double noise_w) {
  if (noise_w <= 0.0) throw std::invalid_argument("f_quad_term: noise power must be > 0");
  const auto ku = static_cast<size_t>(k);
  const double alpha = weights(static_cast<arma::uword>(k));
  const arma::cx_mat& gamma = aux.gamma.at(ku);
  const arma::cx_mat& phi = aux.phi.at(ku);
  const arma::cx_mat& hkk = links.htilde.at(ku).at(ku);
  const arma::uword d = gamma.n_rows;
  const arma::uword n = phi.n_rows;

  arma::cx_mat eye_g = arma::eye<arma::cx_mat>(d, d) + gamma;
  // Full covariance including the desired link.
  arma::cx_mat cov(n, n, arma::fill::zeros);
  for (const auto& h : links.htilde.at(ku)) cov += h * h.t();
  cov += noise_w * arma::eye<arma::cx_mat>(n, n);

  arma::cx_mat cross = hkk.t() * phi;
  arma::cx_mat b = std::sqrt(alpha) * (cross + cross.t()) - phi.t() * cov * phi;

  double val = alpha * log_det_hpd(hermitize(eye_g)) - alpha * arma::trace(gamma).real();
  val += arma::trace(eye_g * b).real();
  return val;
}

double f_quad(const EffectiveLinks& links, const AuxiliaryState& aux, const arma::vec& weights,
              double noise_w) {
  double total = 0.0;
  for (int k = 0; k < links.users(); ++k) total += f_quad_term(k, links, aux, weights, noise_w);
  return total;
}

arma::cx_mat update_gamma(int k, const EffectiveLinks& links, double noise_w) {
  const arma::cx_mat& hkk = links.htilde.at(static_cast<size_t>(k)).at(static_cast<size_t>(k));
  arma::cx_mat m_k = interference_matrix(k, links, noise_w);
  return hermitize(hkk.t() * arma::solve(m_k, hkk));
}

arma::cx_mat update_phi(int k, const EffectiveLinks& links, double alpha_k, double noise_w) {
  const arma::cx_mat& hkk = links.htilde.at(static_cast<size_t>(k)).at(static_cast<size_t>(k));
  arma::cx_mat m_k = interference_matrix(k, links, noise_w);
  arma::cx_mat a = hermitize(m_k + hkk * hkk.t());
  return std::sqrt(alpha_k) * arma::solve(a, hkk);
}

}  // namespace fluidmimo
