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

#include "sounder/config.hpp"
#include "sounder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sounder {

namespace {

// Relative slack when comparing sample counts derived from floating-point times.
constexpr double kSampleSlack = 1e-9;

bool below(double value, double bound)
{
    return value < bound - kSampleSlack * std::max(1.0, std::abs(bound));
}

std::int64_t sum_of(std::span<const int> v)
{
    return std::accumulate(v.begin(), v.end(), std::int64_t{0});
}

int max_of(std::span<const int> v)
{
    return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

void check_vectors(std::span<const int> n_tx, std::span<const int> n_rx)
{
    if (n_tx.size() != n_rx.size())
        throw InvalidConfig("n_T and n_R must have equal length");
    if (n_tx.empty())
        throw InvalidConfig("at least one RF chain is required");
    for (std::size_t p = 0; p < n_tx.size(); ++p)
        if (n_tx[p] < 0 || n_rx[p] < 0)
            throw InvalidConfig("antenna counts must be non-negative");
}

} // namespace

bool ValidationReport::ok() const { return violation_count() == 0; }

std::size_t ValidationReport::violation_count() const
{
    return std::count_if(issues.begin(), issues.end(),
                         [](const ValidationIssue& i) { return i.severity == Severity::violation; });
}

std::size_t ValidationReport::warning_count() const
{
    return issues.size() - violation_count();
}

void check_config(const SounderConfig& cfg)
{
    check_vectors(cfg.n_tx, cfg.n_rx);
    if (max_of(cfg.n_tx) == 0 || max_of(cfg.n_rx) == 0)
        throw InvalidConfig("at least one chain must transmit and one must receive");
    if (!(cfg.sample_rate_hz > 0.0) || !std::isfinite(cfg.sample_rate_hz))
        throw InvalidConfig("sample rate must be positive");
    if (cfg.waveform_length < 1)
        throw InvalidConfig("waveform length L must be >= 1");
    if (cfg.tones < 1 || cfg.tones > cfg.waveform_length)
        throw InvalidConfig("tone count F must satisfy 1 <= F <= L");
    if (cfg.averages < 1)
        throw InvalidConfig("averages M must be >= 1");
    if (cfg.shift < 0 || cfg.shift > 15)
        throw InvalidConfig("shift K must lie in [0, 15]");
    if (cfg.discard < 0 || cfg.skip < 0)
        throw InvalidConfig("P and R must be non-negative");
    if (cfg.switch_time_s < 0.0)
        throw InvalidConfig("switch time must be non-negative");
    if (cfg.chains_per_host < 1)
        throw InvalidConfig("chains per host must be >= 1");
}

ValidationReport validate_config(const SounderConfig& cfg, const SceneBounds& bounds)
{
    check_config(cfg);
    if (bounds.first_delay_max_s < 0.0 || bounds.delay_spread_max_s < 0.0)
        throw InvalidInput("scene bounds must be non-negative");

    ValidationReport report;
    const double fs = cfg.sample_rate_hz;
    const auto L = static_cast<double>(cfg.waveform_length);
    const auto P = static_cast<double>(cfg.discard);

    const double spread_samples = bounds.delay_spread_max_s * fs;
    if (below(L, spread_samples)) {
        std::ostringstream msg;
        msg << "aliasing: L too short (L = " << cfg.waveform_length << " < "
            << spread_samples << " samples of delay spread)";
        report.issues.push_back({Severity::violation, "aliasing", msg.str()});
    }

    // Switches on the transmit side shift the start of the received frame,
    // so the settling time adds to the propagation delays.
    const bool tx_switched = max_of(cfg.n_tx) > 1;
    const double prop_samples = (bounds.first_delay_max_s + bounds.delay_spread_max_s) * fs;
    const double sw_samples = cfg.switch_time_s * fs;
    const double required = tx_switched ? prop_samples + sw_samples : std::max(prop_samples, sw_samples);
    if (below(P, required)) {
        std::ostringstream msg;
        msg << "discard: P = " << cfg.discard << " < " << required << " samples required ("
            << (tx_switched ? "transmit and receive switching" : "receive-only switching") << ")";
        report.issues.push_back({Severity::violation, "discard", msg.str()});
    }

    const int growth = static_cast<int>(std::ceil(std::log2(static_cast<double>(cfg.averages))));
    if (growth - cfg.shift > kHeadroomBits) {
        std::ostringstream msg;
        msg << "headroom: averaging M = " << cfg.averages << " with K = " << cfg.shift << " grows by "
            << growth - cfg.shift << " bits (> " << kHeadroomBits << ")";
        report.issues.push_back({Severity::warning, "headroom", msg.str()});
    }
    return report;
}

ChannelCount count_channels(std::span<const int> n_tx, std::span<const int> n_rx)
{
    check_vectors(n_tx, n_rx);
    ChannelCount c;
    const std::int64_t sum_tx = sum_of(n_tx);
    const std::int64_t sum_rx = sum_of(n_rx);
    std::int64_t trace = 0;
    for (std::size_t p = 0; p < n_tx.size(); ++p)
        trace += std::int64_t{n_tx[p]} * n_rx[p];
    // 1^T (n_T kron n_R) = sum(n_T) sum(n_R)
    c.total = sum_tx * sum_rx - trace;

    // Antenna m behind chain p is the same element in both modes, so the
    // chain pair {p, q} contributes the union of p->q and q->p pairs.
    for (std::size_t p = 0; p < n_tx.size(); ++p)
        for (std::size_t q = p + 1; q < n_tx.size(); ++q) {
            const std::int64_t forward = std::int64_t{n_tx[p]} * n_rx[q];
            const std::int64_t backward = std::int64_t{n_rx[p]} * n_tx[q];
            const std::int64_t both = std::int64_t{std::min(n_tx[p], n_rx[p])} * std::min(n_rx[q], n_tx[q]);
            c.unique += forward + backward - both;
        }
    c.time_slots = std::int64_t{max_of(n_rx)} * sum_tx;
    return c;
}

double processing_gain_db(std::int64_t averages, std::int64_t waveform_length)
{
    return 10.0 * std::log10(static_cast<double>(averages) * static_cast<double>(waveform_length));
}

DopplerLimits max_doppler(const SounderConfig& cfg)
{
    check_config(cfg);
    const double fs = cfg.sample_rate_hz;
    const auto ml = static_cast<double>(cfg.averages * cfg.waveform_length);
    const auto counts = count_channels(cfg.n_tx, cfg.n_rx);
    const double snapshot_samples =
        static_cast<double>(counts.time_slots * cfg.slot_samples() + cfg.skip);

    DopplerLimits d;
    d.per_snapshot = fs / snapshot_samples;
    d.per_burst = fs / static_cast<double>(cfg.slot_samples());
    d.averager_limit = 0.1 * fs / ml;
    return d;
}

DerivedMetrics derive_metrics(const SounderConfig& cfg)
{
    check_config(cfg);
    const double fs = cfg.sample_rate_hz;
    const auto counts = count_channels(cfg.n_tx, cfg.n_rx);
    const std::int64_t active = counts.time_slots * cfg.slot_samples();
    const auto snapshot_samples = static_cast<double>(active + cfg.skip);

    DerivedMetrics m;
    m.bandwidth_hz = fs * static_cast<double>(cfg.tones) / static_cast<double>(cfg.waveform_length);
    m.snapshot_rate_hz = fs / snapshot_samples;
    m.repetition_interval_s = snapshot_samples / fs;
    m.coherence_time_s = static_cast<double>(active) / fs;
    m.channels_total = counts.total;
    m.channels_unique = counts.unique;
    m.time_slots = counts.time_slots;
    m.max_delay_spread_s = static_cast<double>(cfg.waveform_length) / fs;
    m.doppler = max_doppler(cfg);
    m.processing_gain_db = processing_gain_db(cfg.averages, cfg.waveform_length);
    m.data_rate_bytes_per_s = kBytesPerSample * fs * static_cast<double>(cfg.waveform_length) *
                              static_cast<double>(counts.time_slots) * cfg.chains_per_host /
                              snapshot_samples;
    return m;
}

LinkBudget link_budget(const SounderConfig& cfg, double path_loss_db, double tx_gain_dbi,
                       double rx_gain_dbi)
{
    check_config(cfg);
    const double bandwidth =
        cfg.sample_rate_hz * static_cast<double>(cfg.tones) / static_cast<double>(cfg.waveform_length);
    LinkBudget lb;
    lb.rx_power_dbm = cfg.tx_power_dbm + tx_gain_dbi + rx_gain_dbi - path_loss_db;
    lb.noise_floor_dbm = kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth) + cfg.noise_figure_db;
    lb.snr_db = lb.rx_power_dbm - lb.noise_floor_dbm;
    lb.snr_after_gain_db = lb.snr_db + processing_gain_db(cfg.averages, cfg.waveform_length);
    return lb;
}

} // namespace sounder
