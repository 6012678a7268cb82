// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "fluidmimo/rng.hpp"

namespace fluidmimo {

void SystemConfig::validate() const {
  if (num_users < 1) throw std::invalid_argument("need at least one user");
  if (rx_antennas < 1 || tx_antennas < 1) throw std::invalid_argument("antenna counts must be positive");
  if (streams < 1 || streams > rx_antennas || streams > tx_antennas)
    throw std::invalid_argument("stream count must satisfy 1 <= d <= min(M, N)");
  if (clusters < 1) throw std::invalid_argument("cluster count must be positive");
  if (tx_antennas % clusters != 0)
    throw std::invalid_argument("cluster count must divide the transmit antenna count");
  if (paths_tx < 1 || paths_rx < 1) throw std::invalid_argument("path counts must be positive");
  if (carrier_hz <= 0.0) throw std::invalid_argument("carrier frequency must be positive");
  if (dist_min_m <= 0.0 || dist_max_m < dist_min_m)
    throw std::invalid_argument("distance range must satisfy 0 < d_min <= d_max");
  if (realizations < 1) throw std::invalid_argument("realization count must be positive");
  if (!weights.empty() && static_cast<int>(weights.size()) != num_users)
    throw std::invalid_argument("weights length must match the user count");
  for (double w : weights)
    if (w <= 0.0) throw std::invalid_argument("weights must be positive");
  const double lam = wavelength();
  const double side = region_side_m < 0.0 ? lam : region_side_m;
  const double gap = region_gap_m < 0.0 ? lam / 2.0 : region_gap_m;
  if (side <= 0.0) throw std::invalid_argument("region side must be positive");
  if (gap < 0.0) throw std::invalid_argument("region gap must be nonnegative");
}

arma::mat fpa_grid(int count, double lambda_m) {
  const int nx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  arma::mat pos(count, 3, arma::fill::zeros);
  const double pitch = lambda_m / 2.0;
  for (int m = 0; m < count; ++m) {
    pos(m, 0) = (m % nx) * pitch;
    pos(m, 1) = (m / nx) * pitch;
  }
  return pos;
}

std::pair<arma::mat, arma::mat> fpa_positions(const SystemConfig& config) {
  const double lam = config.wavelength();
  return {fpa_grid(config.tx_antennas, lam), fpa_grid(config.rx_antennas, lam)};
}

namespace {

// Cuboid centers laid out on a square grid in the x-y plane. Adjacent
// cuboids are separated by `gap` along at least one axis.
arma::mat region_centers(int count, double side, double gap) {
  const int nx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const double pitch = side + gap;
  arma::mat centers(count, 3, arma::fill::zeros);
  for (int m = 0; m < count; ++m) {
    centers(m, 0) = (m % nx) * pitch;
    centers(m, 1) = (m / nx) * pitch;
  }
  return centers;
}

}  // namespace

Scenario build_scenario(const SystemConfig& config) {
  config.validate();
  Scenario sc;
  sc.config = config;
  sc.lambda_m = config.wavelength();
  sc.pmax_w = dbm_to_watts(config.pmax_dbm);
  sc.noise_w = dbm_to_watts(config.noise_dbm);

  const int K = config.num_users;
  const int M = config.tx_antennas;
  const int N = config.rx_antennas;
  const int d = config.streams;
  const int Lt = config.paths_tx;
  const int Lr = config.paths_rx;

  sc.weights.set_size(K);
  for (int k = 0; k < K; ++k)
    sc.weights(k) = config.weights.empty() ? 1.0 : config.weights[static_cast<size_t>(k)];

  Rng rng(config.seed);

  // Propagation: distances are area-uniform in an annulus, path responses
  // are complex gaussian with pathloss split evenly over the dominant
  // diagonal of the response matrix, angles are uniform on [0, pi).
  const double t0 = db_to_linear(config.ref_gain_db);
  const int q = std::min(Lr, Lt);
  sc.paths.theta_tx.resize(K);
  sc.paths.phi_tx.resize(K);
  sc.paths.theta_rx.resize(K);
  sc.paths.phi_rx.resize(K);
  sc.paths.sigma.resize(K);
  sc.paths.distance_m.resize(K);
  for (int k = 0; k < K; ++k) {
    const double d2 = rng.uniform(config.dist_min_m * config.dist_min_m,
                                  config.dist_max_m * config.dist_max_m);
    const double dist = std::sqrt(d2);
    sc.paths.distance_m[static_cast<size_t>(k)] = dist;
    const double kappa = t0 * std::pow(dist, -config.pathloss_exp);

    arma::cx_mat sigma(Lr, Lt, arma::fill::zeros);
    for (int i = 0; i < q; ++i) sigma(i, i) = rng.cgaussian(kappa / q);
    sc.paths.sigma[static_cast<size_t>(k)] = sigma;

    arma::vec tt(Lt), tp(Lt);
    for (int l = 0; l < Lt; ++l) {
      tt(l) = rng.uniform(0.0, kPi);
      tp(l) = rng.uniform(0.0, kPi);
    }
    sc.paths.theta_tx[static_cast<size_t>(k)] = tt;
    sc.paths.phi_tx[static_cast<size_t>(k)] = tp;

    arma::vec rt(Lr), rp(Lr);
    for (int l = 0; l < Lr; ++l) {
      rt(l) = rng.uniform(0.0, kPi);
      rp(l) = rng.uniform(0.0, kPi);
    }
    sc.paths.theta_rx[static_cast<size_t>(k)] = rt;
    sc.paths.phi_rx[static_cast<size_t>(k)] = rp;
  }

  // Geometry. TRFA mode gets per-antenna cuboids; FPA mode collapses each
  // cuboid to a point on the classic half-wavelength grid.
  const double side = config.region_side_m < 0.0 ? sc.lambda_m : config.region_side_m;
  const double gap = config.region_gap_m < 0.0 ? sc.lambda_m / 2.0 : config.region_gap_m;
  if (config.mode == AntennaMode::kTrfa) {
    const arma::mat tc = region_centers(M, side, gap);
    sc.regions.tx_lo = tc - side / 2.0;
    sc.regions.tx_hi = tc + side / 2.0;
    sc.tx_init = tc;
    sc.regions.rx_lo.resize(K);
    sc.regions.rx_hi.resize(K);
    sc.rx_init.resize(K);
    const arma::mat rc = region_centers(N, side, gap);
    for (int k = 0; k < K; ++k) {
      sc.regions.rx_lo[static_cast<size_t>(k)] = rc - side / 2.0;
      sc.regions.rx_hi[static_cast<size_t>(k)] = rc + side / 2.0;
      sc.rx_init[static_cast<size_t>(k)] = rc;
    }
  } else {
    auto [tg, rg] = fpa_positions(config);
    sc.regions.tx_lo = tg;
    sc.regions.tx_hi = tg;
    sc.tx_init = tg;
    sc.regions.rx_lo.assign(static_cast<size_t>(K), rg);
    sc.regions.rx_hi.assign(static_cast<size_t>(K), rg);
    sc.rx_init.assign(static_cast<size_t>(K), rg);
  }

  // Initial beamformers: i.i.d. complex gaussian entries, then one joint
  // scaling that lands the stack exactly on the power budget.
  sc.w_init.resize(K);
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    arma::cx_mat w(M, d);
    for (int j = 0; j < d; ++j)
      for (int m = 0; m < M; ++m) w(m, j) = rng.cgaussian(1.0);
    total += std::pow(arma::norm(w, "fro"), 2);
    sc.w_init[static_cast<size_t>(k)] = w;
  }
  const double scale = std::sqrt(sc.pmax_w / total);
  for (auto& w : sc.w_init) w *= scale;

  return sc;
}

}  // namespace fluidmimo
