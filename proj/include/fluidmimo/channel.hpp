// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fluidmimo/common.hpp"

namespace fluidmimo {

// Unit propagation direction for elevation theta and azimuth phi.
arma::vec3 steering_dir(double theta, double phi);

// 3 x L matrix whose columns are steering_dir(theta(l), phi(l)).
arma::mat steering_dirs(const arma::vec& theta, const arma::vec& phi);

// Field response of one element at `position` against L path directions:
// entries exp(j 2pi/lambda <dir_l, position>).
arma::cx_vec field_response(const arma::vec3& position, const arma::mat& dirs, double lambda_m);

// Field-response matrix for a block of elements, one column per row of
// `positions` (L x n).
arma::cx_mat field_response_block(const arma::mat& positions, const arma::mat& dirs,
                                  double lambda_m);

// Effective channel F^H * Sigma * G for one antenna block. Evaluated
// column-by-column so that concatenating per-cluster results is bitwise
// identical to one full-width evaluation.
arma::cx_mat assemble_channel(const arma::cx_mat& rx_frm, const arma::cx_mat& sigma,
                              const arma::cx_mat& tx_frm);

}  // namespace fluidmimo
