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

// Post-processing of captured records: transfer functions, narrowband
// gains and combining, parameter-space filtering and bistatic bearing
// intersection.

#ifndef SOUNDER_ESTIMATE_HPP
#define SOUNDER_ESTIMATE_HPP

#include "sounder/channel.hpp"
#include "sounder/dsp.hpp"
#include "sounder/tensor.hpp"
#include "sounder/waveform.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sounder {

/// Multipath estimate with bookkeeping from the estimator.
struct PathEstimate
{
    Mpc mpc;
    double power_db = 0.0;          // 10 log10 of the squared Frobenius norm of gamma
    double contribution_db = 0.0;   // share of the record energy explained, dB
    int iterations = 0;
    double time_s = 0.0;            // start of the observation window
};

struct TransferResult
{
    ChannelTensor y; // spectral, all L bins
    ChannelTensor h; // Y / x on the occupied bins, absolute frequency axis
};

/// DFT over the sample axis, then division by the tone amplitudes.
TransferResult transfer_function(const ChannelTensor& d, const ToneSpec<double>& tones, const SounderConfig& cfg);

/// Frames, averages and dequantizes the ADC stream of receive chain
/// `rx_chain`, writing every averaged waveform into the raw tensor `d`.
/// Returns the number of saturated additions.
std::size_t capture_raw(ChannelTensor& d, std::span<const Iq16> stream, const SounderConfig& cfg,
                        const ChannelPlan& plan, int rx_chain, const AdcModel& adc);

/// Floating-point counterpart of capture_raw for unquantized streams.
void capture_raw(ChannelTensor& d, std::span<const cd> stream, const SounderConfig& cfg, const ChannelPlan& plan,
                 int rx_chain);

/// 20 log10 |H| at bin k0: one row per snapshot, one column per measured
/// (p_T, p_R, m_T, m_R) in index order.
MatX<double> narrowband_gain(const ChannelTensor& h, Eigen::Index k0);

/// Combined power gain sum_a |h_a(s)|^2 at bin k0 per snapshot, in dB.
VecX<double> mrc_combine(const ChannelTensor& h, Eigen::Index k0);

/// Closed interval; for angles membership is tested modulo a full turn.
struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
};

struct SubspaceBounds
{
    std::optional<Interval> delay_s;
    std::optional<Interval> doppler_hz;
    std::optional<Interval> aod_azimuth;
    std::optional<Interval> aod_elevation;
    std::optional<Interval> aoa_azimuth;
    std::optional<Interval> aoa_elevation;
    std::optional<Interval> power_db;

    bool contains(const PathEstimate& p) const;
};

/// Keeps the estimates that fall inside every bounded parameter range.
std::vector<PathEstimate> subspace_filter(const std::vector<PathEstimate>& paths, const SubspaceBounds& bounds);

/// Intersection of the rays p1 + t d(phi1) and p2 + u d(phi2), t, u >= 0,
/// bearings counterclockwise from the +x axis. Empty for parallel rays or
/// an intersection behind either origin.
std::optional<Eigen::Vector2d> intersect_bearings(const Eigen::Vector2d& p1, double phi1, const Eigen::Vector2d& p2,
                                                  double phi2);

/// Bearing of `target` seen from `origin`.
double bearing_to(const Eigen::Vector2d& origin, const Eigen::Vector2d& target);

} // namespace sounder

#endif // SOUNDER_ESTIMATE_HPP
