// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fluidmimo/runtime.hpp"

namespace fluidmimo {

// Nesterov-style momentum weight for outer iteration i (1-based):
// max{(i - 2) / (i + 1), 0}.
double extrapolation_weight(int iteration);

// min{sqrt(pmax / p_q), 1}; a zero-power candidate keeps scale 1.
double projection_scale(double pmax_w, double p_q);

struct WRoundResult {
  bool skipped = false;   // degenerate curvature, beamformers left untouched
  double eta = 0.0;       // spectral-surrogate curvature scale
  double p_q = 0.0;       // power of the unprojected candidate
  double scale = 1.0;     // applied power projection factor
};

// One inverse-free beamformer round over the fabric: curvature scale from
// per-cluster Gram blocks, momentum extrapolation, candidate assembly and
// the closed-form power projection. Updates every cluster's beam memory
// unless the curvature is degenerate.
WRoundResult update_w_round(DbpRuntime& rt, int iteration, bool use_extrapolation);

}  // namespace fluidmimo
