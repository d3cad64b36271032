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

// Forward model: specular multipath components observed through the
// switched arrays, the chain hardware and the TDMA schedule.

#ifndef SOUNDER_CHANNEL_HPP
#define SOUNDER_CHANNEL_HPP

#include "sounder/calib.hpp"
#include "sounder/config.hpp"
#include "sounder/geometry.hpp"
#include "sounder/schedule.hpp"
#include "sounder/tensor.hpp"
#include "sounder/waveform.hpp"

#include <cstdint>
#include <vector>

namespace sounder {

/// One specular path. Angles in radians, azimuth in [-pi, pi) and
/// elevation from zenith in [0, pi]; `gamma` maps the (H, V) transmit
/// polarization onto the (H, V) receive polarization.
struct Mpc
{
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    double aod_azimuth = 0.0;
    double aod_elevation = kPi / 2;
    double aoa_azimuth = 0.0;
    double aoa_elevation = kPi / 2;
    Eigen::Matrix2cd gamma = Eigen::Matrix2cd::Zero();
    int tx_chain = -1; // restricts the path to one link; -1 matches any chain
    int rx_chain = -1;

    bool applies_to(int pt, int pr) const
    {
        return (tx_chain < 0 || tx_chain == pt) && (rx_chain < 0 || rx_chain == pr);
    }
};

/// Throws InvalidInput when a path breaks its range invariants.
void check_mpc(const Mpc& mpc);

/// Deterministic, order-independent seed for one tensor row or stream.
std::uint64_t entry_seed(std::uint64_t master, std::initializer_list<std::int64_t> indices);

/// Transfer functions of every scheduled channel on the occupied tones,
/// kind `hardware`:
///   H = sum_l a_R^T Gamma_l a_T b_{pT,pR}(k) exp(-j 2 pi f_k tau_l) exp(j 2 pi nu_l t)
/// plus circular white noise of power `noise_power` per entry.
/// `arrays[p]` holds the antennas of chain p, used for both directions.
ChannelTensor synth_transfer(const std::vector<Mpc>& mpcs, const std::vector<PanelGeometry>& arrays,
                             const B2bSet& b, const TimestampMap& tmap, const SounderConfig& cfg,
                             const ToneSpec<double>& tones, double noise_power, std::uint64_t seed = 0);

/// Complex baseband stream seen by receive chain `rx_chain` over
/// `snapshots` snapshots, (S - 1) T_rep + one snapshot of slots long.
///
/// Each slot carries the periodic response of the slot's channel to the
/// sounding waveform with the path Doppler applied sample by sample; the
/// first T_sw of a slot is silent while the switches settle. Noise of
/// power `noise_power` is added to every sample.
CVec synth_stream(const std::vector<Mpc>& mpcs, const std::vector<PanelGeometry>& arrays, const B2bSet& b,
                  const SounderConfig& cfg, const ChannelPlan& plan, const ToneSpec<double>& tones,
                  double noise_power, int rx_chain, int snapshots, std::uint64_t seed = 0,
                  double start_s = 0.0);

} // namespace sounder

#endif // SOUNDER_CHANNEL_HPP
