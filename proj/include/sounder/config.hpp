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

#ifndef SOUNDER_CONFIG_HPP
#define SOUNDER_CONFIG_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sounder {

/// Frame, array and RF parameters of one sounder deployment.
///
/// Sample counts (L, P, R, ...) are integers; times are seconds and
/// frequencies Hz. `n_tx[p]` / `n_rx[p]` give the number of switched
/// antennas behind RF chain p in transmit / receive mode.
struct SounderConfig
{
    double carrier_hz = 5.675e9;
    double sample_rate_hz = 500e6;
    std::int64_t waveform_length = 1024; // L
    std::int64_t tones = 819;            // F
    std::int64_t averages = 8;           // M
    int shift = 3;                       // K, averager divisor 2^K
    std::int64_t discard = 9216;         // P
    std::int64_t skip = 0;               // R
    std::vector<int> n_tx;
    std::vector<int> n_rx;
    double switch_time_s = 0.0;          // T_sw
    int adc_bits = 12;
    double tx_power_dbm = 18.0;
    double noise_figure_db = 7.0;
    int chains_per_host = 1;             // N_RF,USRP in the data-rate figure
    int zc_root = 1;

    double sample_period() const { return 1.0 / sample_rate_hz; }
    std::size_t chain_count() const { return n_tx.size(); }
    /// Samples spent in one TDMA slot, P + M L.
    std::int64_t slot_samples() const { return discard + averages * waveform_length; }
};

/// Worst-case propagation bounds of the measured scene.
struct SceneBounds
{
    double first_delay_max_s = 0.0;  // tau_0,max
    double delay_spread_max_s = 0.0; // delta tau_max
};

enum class Severity { violation, warning };

struct ValidationIssue
{
    Severity severity;
    std::string code;
    std::string message;
};

struct ValidationReport
{
    std::vector<ValidationIssue> issues;

    bool ok() const;
    std::size_t violation_count() const;
    std::size_t warning_count() const;
};

struct ChannelCount
{
    std::int64_t total = 0;      // ordered pairs, reciprocal channels included
    std::int64_t unique = 0;     // unordered antenna pairs
    std::int64_t time_slots = 0; // max(n_R) * sum(n_T)
};

struct DopplerLimits
{
    double per_snapshot = 0.0;   // snapshot rate f_rep
    double per_burst = 0.0;      // f_s / (P + M L)
    double averager_limit = 0.0; // 0.1 f_s / (M L)
};

struct DerivedMetrics
{
    double bandwidth_hz = 0.0;
    double snapshot_rate_hz = 0.0;
    double repetition_interval_s = 0.0;
    double coherence_time_s = 0.0;
    std::int64_t channels_total = 0;
    std::int64_t channels_unique = 0;
    std::int64_t time_slots = 0;
    double max_delay_spread_s = 0.0;
    DopplerLimits doppler;
    double processing_gain_db = 0.0;
    double data_rate_bytes_per_s = 0.0;
};

struct LinkBudget
{
    double rx_power_dbm = 0.0;
    double noise_floor_dbm = 0.0;
    double snr_db = 0.0;
    double snr_after_gain_db = 0.0;
};

/// Bits of growth the shift-then-add averager may use above the 16-bit input.
inline constexpr int kHeadroomBits = 2;

/// Throws InvalidConfig when a structural invariant of `cfg` is broken.
void check_config(const SounderConfig& cfg);

/// Frame-timing checks against the scene bounds; never throws for timing
/// problems, only for malformed configs.
ValidationReport validate_config(const SounderConfig& cfg, const SceneBounds& bounds);

ChannelCount count_channels(std::span<const int> n_tx, std::span<const int> n_rx);

DerivedMetrics derive_metrics(const SounderConfig& cfg);

DopplerLimits max_doppler(const SounderConfig& cfg);

double processing_gain_db(std::int64_t averages, std::int64_t waveform_length);

LinkBudget link_budget(const SounderConfig& cfg, double path_loss_db, double tx_gain_dbi,
                       double rx_gain_dbi);

/// Thermal noise density at 290 K.
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

/// Bytes per complex sample on the host link (complex 16-bit).
inline constexpr int kBytesPerSample = 4;

} // namespace sounder

#endif // SOUNDER_CONFIG_HPP
