// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fluidmimo {

arma::vec3 steering_dir(double theta, double phi) {
  arma::vec3 g;
  g(0) = std::cos(theta) * std::cos(phi);
  g(1) = std::cos(theta) * std::sin(phi);
  g(2) = std::sin(theta);
  return g;
}

arma::mat steering_dirs(const arma::vec& theta, const arma::vec& phi) {
  if (theta.n_elem != phi.n_elem) throw std::invalid_argument("angle vectors differ in length");
  arma::mat dirs(3, theta.n_elem);
  for (arma::uword l = 0; l < theta.n_elem; ++l) dirs.col(l) = steering_dir(theta(l), phi(l));
  return dirs;
}

arma::cx_vec field_response(const arma::vec3& position, const arma::mat& dirs, double lambda_m) {
  if (lambda_m <= 0.0) throw std::invalid_argument("wavelength must be positive");
  const double w = 2.0 * kPi / lambda_m;
  arma::cx_vec v(dirs.n_cols);
  for (arma::uword l = 0; l < dirs.n_cols; ++l) {
    const double ph = w * arma::dot(dirs.col(l), position);
    v(l) = cx(std::cos(ph), std::sin(ph));
  }
  return v;
}

arma::cx_mat field_response_block(const arma::mat& positions, const arma::mat& dirs,
                                  double lambda_m) {
  if (positions.n_cols != 3) throw std::invalid_argument("positions must be n x 3");
  arma::cx_mat frm(dirs.n_cols, positions.n_rows);
  for (arma::uword m = 0; m < positions.n_rows; ++m) {
    const arma::vec3 p = positions.row(m).t();
    frm.col(m) = field_response(p, dirs, lambda_m);
  }
  return frm;
}

arma::cx_mat assemble_channel(const arma::cx_mat& rx_frm, const arma::cx_mat& sigma,
                              const arma::cx_mat& tx_frm) {
  if (rx_frm.n_rows != sigma.n_rows || sigma.n_cols != tx_frm.n_rows)
    throw std::invalid_argument("channel factor dimensions disagree");
  const arma::cx_mat e = rx_frm.t() * sigma;  // N x L_tx, shared by all columns
  arma::cx_mat h(rx_frm.n_cols, tx_frm.n_cols);
  for (arma::uword m = 0; m < tx_frm.n_cols; ++m) h.col(m) = e * tx_frm.col(m);
  return h;
}

}  // namespace fluidmimo
