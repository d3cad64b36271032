// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Space-alternating generalized EM estimation of specular paths from
// calibrated transfer functions.

#ifndef SOUNDER_SAGE_HPP
#define SOUNDER_SAGE_HPP

#include "sounder/estimate.hpp"
#include "sounder/geometry.hpp"
#include "sounder/schedule.hpp"
#include "sounder/tensor.hpp"

#include <vector>

namespace sounder {

struct SageSettings
{
    int max_paths = 5;
    int max_iterations = 20;        // SAGE sweeps over all paths
    double convergence = 1e-6;      // relative residual change that ends the sweeps
    double dynamic_range_db = 30.0; // paths weaker than strongest - this are dropped
    double detection_factor = 100.0; // minimum explained energy in units of noise variance

    double delay_step_s = 0.0;      // 0: 1 / (2 bandwidth)
    double doppler_step_hz = 0.0;   // 0: 1 / (2 S T_rep)
    double angle_step_deg = 2.0;
    int refine_levels = 2;
    int refine_factor = 8;

    /// Azimuth search span centred on the array boresight. Planar arrays
    /// cannot tell front from back, so the default is the front half-space.
    double azimuth_span_deg = 180.0;

    int first_snapshot = 0;
    int snapshots = 0; // observation window length; 0 uses every snapshot
};

struct SageResult
{
    std::vector<PathEstimate> paths;      // strongest first
    std::vector<double> residual_history; // after every path update, all links
    double noise_variance = 0.0;
    ChannelTensor residual;
};

/// Estimates the paths of every measured chain pair independently.
/// Parameters an array cannot observe are held fixed: a single transmit
/// (receive) antenna pins the AoD (AoA) to the array boresight, a single
/// snapshot pins the Doppler to zero.
SageResult sage_estimate(const ChannelTensor& h, const std::vector<PanelGeometry>& arrays, const TimestampMap& tmap,
                         const SageSettings& settings = {});

} // namespace sounder

#endif // SOUNDER_SAGE_HPP
