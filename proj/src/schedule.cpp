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

#include "sounder/schedule.hpp"
#include "sounder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sounder {

int ChannelPlan::slot_of(int tx_chain, int tx_antenna, int rx_chain, int rx_antenna) const
{
    const int chains = static_cast<int>(n_tx.size());
    if (tx_chain < 0 || tx_chain >= chains || rx_chain < 0 || rx_chain >= chains)
        throw InvalidInput("chain index out of range");
    if (tx_chain == rx_chain)
        throw InvalidInput("a chain cannot measure itself");
    if (tx_antenna < 0 || tx_antenna >= n_tx[static_cast<std::size_t>(tx_chain)] || rx_antenna < 0 ||
        rx_antenna >= n_rx[static_cast<std::size_t>(rx_chain)])
        throw InvalidInput("antenna index out of range");
    const int offset = std::accumulate(n_tx.begin(), n_tx.begin() + tx_chain, 0);
    return (offset + tx_antenna) * rx_positions + rx_antenna;
}

ChannelPlan build_schedule(const SounderConfig& cfg)
{
    const auto& n_tx = cfg.n_tx;
    const auto& n_rx = cfg.n_rx;
    if (n_tx.size() != n_rx.size() || n_tx.empty())
        throw InvalidConfig("n_T and n_R must have equal, non-zero length");
    const int max_rx = *std::max_element(n_rx.begin(), n_rx.end());
    const int sum_tx = std::accumulate(n_tx.begin(), n_tx.end(), 0);
    if (max_rx <= 0 || sum_tx <= 0)
        throw EmptyPlan("no transmitting or no receiving antenna configured");

    ChannelPlan plan;
    plan.n_tx = n_tx;
    plan.n_rx = n_rx;
    plan.rx_positions = max_rx;
    plan.slot_samples = cfg.slot_samples();
    plan.slot_duration_s = static_cast<double>(plan.slot_samples) / cfg.sample_rate_hz;
    plan.slots.reserve(static_cast<std::size_t>(max_rx) * static_cast<std::size_t>(sum_tx));

    const int chains = static_cast<int>(n_tx.size());
    for (int pt = 0; pt < chains; ++pt)
        for (int mt = 0; mt < n_tx[static_cast<std::size_t>(pt)]; ++mt)
            for (int pos = 0; pos < max_rx; ++pos) {
                Slot slot;
                slot.index = static_cast<int>(plan.slots.size());
                slot.tx = {pt, mt};
                slot.rx_position = pos;
                for (int pr = 0; pr < chains; ++pr)
                    if (pr != pt && pos < n_rx[static_cast<std::size_t>(pr)])
                        slot.rx.push_back({pr, pos});
                plan.slots.push_back(std::move(slot));
            }
    return plan;
}

std::int64_t compute_skip(const SounderConfig& cfg, double repetition_s)
{
    check_config(cfg);
    const auto counts = count_channels(cfg.n_tx, cfg.n_rx);
    const std::int64_t active = counts.time_slots * cfg.slot_samples();

    // Snap T_rep * f_s to the nearest integer when it is one up to rounding,
    // so e.g. 5 ms at 500 Msps yields exactly 2.5e6 samples.
    const double samples = repetition_s * cfg.sample_rate_hz;
    const double nearest = std::round(samples);
    const double interval =
        std::abs(samples - nearest) <= 1e-9 * std::max(1.0, std::abs(samples)) ? nearest : std::ceil(samples);
    const auto skip = static_cast<std::int64_t>(interval) - active;
    if (skip < 0) {
        std::ostringstream msg;
        msg << "repetition interval " << repetition_s << " s is shorter than one snapshot ("
            << static_cast<double>(active) / cfg.sample_rate_hz << " s)";
        throw Infeasible(msg.str());
    }
    return skip;
}

TimestampMap::TimestampMap(const ChannelPlan& plan, const SounderConfig& cfg, int snapshots, double start_s)
    : plan_(plan), start_s_(start_s), snapshots_(snapshots)
{
    if (snapshots < 0)
        throw InvalidInput("snapshot count must be non-negative");
    const double fs = cfg.sample_rate_hz;
    const std::int64_t period = static_cast<std::int64_t>(plan.size()) * plan.slot_samples + cfg.skip;
    repetition_s_ = static_cast<double>(period) / fs;
    slot_offsets_.resize(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i)
        slot_offsets_[i] =
            static_cast<double>(static_cast<std::int64_t>(i) * plan.slot_samples + cfg.discard) / fs;
}

double TimestampMap::slot_time(int snapshot, int slot) const
{
    if (snapshot < 0 || snapshot >= snapshots_ || slot < 0 || slot >= static_cast<int>(slot_offsets_.size()))
        throw InvalidInput("timestamp index out of range");
    return start_s_ + snapshot * repetition_s_ + slot_offsets_[static_cast<std::size_t>(slot)];
}

double TimestampMap::at(int snapshot, int tx_chain, int rx_chain, int tx_antenna, int rx_antenna) const
{
    return slot_time(snapshot, plan_.slot_of(tx_chain, tx_antenna, rx_chain, rx_antenna));
}

TimestampMap timestamps(const ChannelPlan& plan, const SounderConfig& cfg, int snapshots, double start_s)
{
    return TimestampMap(plan, cfg, snapshots, start_s);
}

SwitchTimeline switch_timeline(const ChannelPlan& plan, const SounderConfig& cfg, double max_switch_rate_hz)
{
    if (plan.slots.empty())
        throw EmptyPlan("switch timeline of an empty plan");
    SwitchTimeline tl;
    const double fs = cfg.sample_rate_hz;
    for (const auto& slot : plan.slots) {
        const double t = static_cast<double>(slot.index * plan.slot_samples) / fs;
        tl.events.push_back({t, slot.index, slot.tx.chain, SwitchMode::transmit, slot.tx.antenna});
        for (const auto& rx : slot.rx)
            tl.events.push_back({t, slot.index, rx.chain, SwitchMode::receive, rx.antenna});
    }
    tl.switch_rate_hz = 1.0 / plan.slot_duration_s;
    if (tl.switch_rate_hz > max_switch_rate_hz) {
        std::ostringstream msg;
        msg << "slot duration " << plan.slot_duration_s * 1e6 << " us implies a switch rate of "
            << tl.switch_rate_hz << " Hz above the " << max_switch_rate_hz << " Hz switch limit";
        tl.warnings.push_back(msg.str());
    }
    return tl;
}

} // namespace sounder
