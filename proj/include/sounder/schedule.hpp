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

#ifndef SOUNDER_SCHEDULE_HPP
#define SOUNDER_SCHEDULE_HPP

#include "sounder/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sounder {

struct AntennaRef
{
    int chain = 0;
    int antenna = 0;

    friend bool operator==(const AntennaRef&, const AntennaRef&) = default;
    friend auto operator<=>(const AntennaRef&, const AntennaRef&) = default;
};

/// One TDMA slot: a single transmitting antenna, every other chain
/// listening on the antenna its switch currently selects.
struct Slot
{
    int index = 0;
    AntennaRef tx;
    int rx_position = 0; // switch position shared by all receiving chains
    std::vector<AntennaRef> rx;
};

struct ChannelPlan
{
    std::vector<Slot> slots;
    std::vector<int> n_tx;
    std::vector<int> n_rx;
    std::int64_t slot_samples = 0;
    double slot_duration_s = 0.0;
    int rx_positions = 0; // max(n_R)

    std::size_t size() const { return slots.size(); }

    /// Slot that measures tx (p_T, m_T) -> rx antenna m_R. Throws InvalidInput
    /// for combinations the plan never measures.
    int slot_of(int tx_chain, int tx_antenna, int rx_chain, int rx_antenna) const;
};

/// Transmit antennas in (chain, antenna) order; for each, the receive
/// switches step together through max(n_R) positions. Chains with fewer
/// receive antennas idle in the surplus positions.
ChannelPlan build_schedule(const SounderConfig& cfg);

/// Inter-snapshot skip R realizing the repetition interval `repetition_s`:
/// R = ceil(T_rep / T_s) - max(n_R) sum(n_T) (P + M L).
/// The value of cfg.skip is ignored.
std::int64_t compute_skip(const SounderConfig& cfg, double repetition_s);

/// Measurement instant of every channel, anchored at the first retained
/// sample of the averaging window of its slot.
class TimestampMap
{
public:
    TimestampMap() = default;
    TimestampMap(const ChannelPlan& plan, const SounderConfig& cfg, int snapshots, double start_s = 0.0);

    int snapshots() const { return snapshots_; }
    double repetition_interval() const { return repetition_s_; }

    double slot_time(int snapshot, int slot) const;
    double at(int snapshot, int tx_chain, int rx_chain, int tx_antenna, int rx_antenna) const;

private:
    ChannelPlan plan_;
    std::vector<double> slot_offsets_;
    double repetition_s_ = 0.0;
    double start_s_ = 0.0;
    int snapshots_ = 0;
};

TimestampMap timestamps(const ChannelPlan& plan, const SounderConfig& cfg, int snapshots,
                        double start_s = 0.0);

enum class SwitchMode { transmit, receive };

struct SwitchEvent
{
    double time_s = 0.0;
    int slot = 0;
    int chain = 0;
    SwitchMode mode = SwitchMode::receive;
    int antenna = 0;
};

struct SwitchTimeline
{
    std::vector<SwitchEvent> events;
    double switch_rate_hz = 0.0; // state changes per second on a busy chain
    std::vector<std::string> warnings;
};

/// Maximum RF switch toggling frequency of the panel switches.
inline constexpr double kMaxSwitchRateHz = 50e3;

/// One state change per active chain at the start of every slot, for the
/// first snapshot.
SwitchTimeline switch_timeline(const ChannelPlan& plan, const SounderConfig& cfg,
                               double max_switch_rate_hz = kMaxSwitchRateHz);

} // namespace sounder

#endif // SOUNDER_SCHEDULE_HPP
