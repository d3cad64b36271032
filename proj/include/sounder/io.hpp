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

// File formats: binary tensors and streams with JSON sidecars, back-to-back
// sets, path tables and attenuator traces. All binary data little-endian.

#ifndef SOUNDER_IO_HPP
#define SOUNDER_IO_HPP

#include "sounder/calib.hpp"
#include "sounder/config.hpp"
#include "sounder/dsp.hpp"
#include "sounder/estimate.hpp"
#include "sounder/schedule.hpp"
#include "sounder/tensor.hpp"
#include "sounder/waveform.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sounder {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

Json to_json(const SounderConfig& cfg);
Json to_json(const ChannelPlan& plan);
Json to_json(const DerivedMetrics& m);
Json to_json(const ToneSpec<double>& tones);

/// Hash of the canonical JSON form of a config or plan.
std::string config_hash(const SounderConfig& cfg);
std::string plan_hash(const ChannelPlan& plan);

/// Writes `<stem>.cf32` and `<stem>.json`.
void write_tensor(const std::filesystem::path& stem, const ChannelTensor& t, const Json& extra = {});
ChannelTensor read_tensor(const std::filesystem::path& stem);

/// Writes `<stem>.iq16` and `<stem>.json`.
void write_stream(const std::filesystem::path& stem, std::span<const Iq16> samples, const Json& meta);
std::vector<Iq16> read_stream(const std::filesystem::path& stem, Json* meta = nullptr);

/// Interleaved float64 I/Q.
void write_cf64(const std::filesystem::path& file, const CVec& v);
CVec read_cf64(const std::filesystem::path& file);

/// Waveform as 16-bit I/Q scaled so the largest component sits at 0.9 of
/// the integer range.
void write_waveform_iq16(const std::filesystem::path& file, const TimeWaveform<double>& w);

/// Writes `<stem>.cf64` (measured pairs in (p_T, p_R) order) and
/// `<stem>.json` with the pair mask.
void write_b2b(const std::filesystem::path& stem, const B2bSet& set, const Json& extra = {});
B2bSet read_b2b(const std::filesystem::path& stem);

/// Slot list with the measurement instant of each (tx, rx) entry.
void write_plan_csv(const std::filesystem::path& file, const ChannelPlan& plan, const TimestampMap& tmap);

void write_paths_csv(const std::filesystem::path& file, const std::vector<PathEstimate>& paths);

struct TracePoint
{
    double frequency_hz = 0.0;
    cd s21;
};

/// Whitespace- or comma-separated "frequency re im" lines; '#' starts a
/// comment.
std::vector<TracePoint> read_attenuator_trace(const std::filesystem::path& file);

/// Linear interpolation of the trace (real and imaginary parts) at the
/// given frequencies, held constant beyond the ends.
CVec resample_trace(const std::vector<TracePoint>& trace, const VecX<double>& frequencies);

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

} // namespace sounder

#endif // SOUNDER_IO_HPP
