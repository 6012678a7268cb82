// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fluidmimo/common.hpp"

namespace fluidmimo {

enum class AntennaMode { kFpa, kTrfa };

// System-level knobs. Defaults reproduce the reference simulation setup
// (6 users x 4 antennas, 64-antenna transmitter, 28 GHz, 20 dBm budget).
struct SystemConfig {
  int num_users = 6;            // K
  int rx_antennas = 4;          // N per user
  int tx_antennas = 64;         // M, summed over clusters
  int clusters = 4;             // C
  int streams = 4;              // d per user
  double carrier_hz = 28e9;
  double pmax_dbm = 20.0;
  double noise_dbm = -80.0;
  int paths_tx = 3;             // scatterers seen from the transmitter
  int paths_rx = 3;             // scatterers seen from a receiver
  double pathloss_exp = 3.67;
  double ref_gain_db = -61.4;   // pathloss at 1 m, in dB
  double dist_min_m = 20.0;
  double dist_max_m = 100.0;
  double region_side_m = -1.0;  // <0: default to one wavelength
  double region_gap_m = -1.0;   // <0: default to half a wavelength
  int realizations = 20;        // S
  std::uint64_t seed = 1;
  AntennaMode mode = AntennaMode::kTrfa;
  std::vector<double> weights;  // empty: all ones

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  // Throws std::invalid_argument on inconsistent settings (C not dividing M,
  // non-positive dims, d > N, empty region overlap, bad weights length).
  void validate() const;
};

// Per-user propagation geometry, drawn once per realization and shared by
// every cluster partitioning of the same seed.
struct PathSet {
  std::vector<arma::vec> theta_tx, phi_tx;  // transmit-side path angles
  std::vector<arma::vec> theta_rx, phi_rx;  // receive-side path angles
  std::vector<arma::cx_mat> sigma;          // paths_rx x paths_tx responses
  std::vector<double> distance_m;
};

// Axis-aligned movement cuboids, one row of bounds per antenna.
struct Regions {
  arma::mat tx_lo, tx_hi;               // M x 3
  std::vector<arma::mat> rx_lo, rx_hi;  // per user, N x 3
};

struct Scenario {
  SystemConfig config;
  double lambda_m = 0.0;
  double pmax_w = 0.0;
  double noise_w = 0.0;
  arma::vec weights;                  // K entries
  PathSet paths;
  Regions regions;
  arma::mat tx_init;                  // M x 3 starting transmit positions
  std::vector<arma::mat> rx_init;     // per user, N x 3
  std::vector<arma::cx_mat> w_init;   // per user, M x d, jointly power-scaled
};

// Half-wavelength square grid holding `count` elements, row-major in x-y.
arma::mat fpa_grid(int count, double lambda_m);

// Fixed-array positions for transmitter and one user terminal.
std::pair<arma::mat, arma::mat> fpa_positions(const SystemConfig& config);

// Draws paths, regions and the initial iterate. Deterministic in
// config.seed and independent of config.clusters, so the same seed yields
// the same physical instance under any partitioning.
Scenario build_scenario(const SystemConfig& config);

}  // namespace fluidmimo
