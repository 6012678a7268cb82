// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <complex>
#include <cstdint>
#include <map>
#include <string>

namespace fluidmimo {

using cx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

// dBm -> watts and plain dB -> linear power ratio.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Complex multiply-add counter, tallied per processing phase. Units are
// coarse: one unit per complex scalar multiply-accumulate, so a dense
// (m x n)*(n x p) product books m*n*p.
struct OpCounter {
  std::map<std::string, std::uint64_t> by_phase;
  std::uint64_t total = 0;

  void add(const std::string& phase, std::uint64_t n) {
    by_phase[phase] += n;
    total += n;
  }
  void reset() {
    by_phase.clear();
    total = 0;
  }
};

}  // namespace fluidmimo
