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

// Arithmetic model of the on-device receive path: sample discard, framing,
// fixed-point block averaging and ADC quantization.

#ifndef SOUNDER_DSP_HPP
#define SOUNDER_DSP_HPP

#include "sounder/config.hpp"
#include "sounder/errors.hpp"
#include "sounder/schedule.hpp"
#include "sounder/types.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sounder {

/// Complex short, as delivered by the ADC.
struct Iq16
{
    std::int16_t i = 0;
    std::int16_t q = 0;

    friend bool operator==(const Iq16&, const Iq16&) = default;
};

/// M consecutive waveforms of length L captured in one slot.
template <typename Sample>
struct FrameGroup
{
    int snapshot = 0;
    int slot = 0;
    AntennaRef tx;
    AntennaRef rx;
    std::vector<Sample> samples; // M * L, frame-major
};

template <typename Sample>
class TruncatedCapture : public Error
{
public:
    TruncatedCapture(const std::string& what, std::vector<FrameGroup<Sample>> partial)
        : Error(what), partial_(std::move(partial))
    {
    }
    const std::vector<FrameGroup<Sample>>& partial() const { return partial_; }

private:
    std::vector<FrameGroup<Sample>> partial_;
};

/// Splits the sample stream of one receive chain into per-slot frame groups.
///
/// Each slot skips P samples and keeps M L; a snapshot spans
/// slots * (P + M L) + R samples, so consecutive snapshots start T_rep
/// apart. Slots in which `rx_chain` idles (or transmits) record nothing.
template <typename Sample>
std::vector<FrameGroup<Sample>> frame_stream(std::span<const Sample> stream, const SounderConfig& cfg,
                                             const ChannelPlan& plan, int rx_chain, int snapshots)
{
    const auto P = cfg.discard;
    const auto keep = cfg.averages * cfg.waveform_length;
    const auto period = static_cast<std::int64_t>(plan.size()) * plan.slot_samples + cfg.skip;
    const auto available = static_cast<std::int64_t>(stream.size());

    std::vector<FrameGroup<Sample>> out;
    for (int s = 0; s < snapshots; ++s) {
        for (const auto& slot : plan.slots) {
            const std::int64_t start = s * period + slot.index * plan.slot_samples + P;
            const auto it = std::find_if(slot.rx.begin(), slot.rx.end(),
                                         [&](const AntennaRef& r) { return r.chain == rx_chain; });
            if (it == slot.rx.end())
                continue;
            if (start + keep > available)
                throw TruncatedCapture<Sample>("stream underrun in snapshot " + std::to_string(s) + ", slot " +
                                                   std::to_string(slot.index),
                                               std::move(out));
            FrameGroup<Sample> g;
            g.snapshot = s;
            g.slot = slot.index;
            g.tx = slot.tx;
            g.rx = *it;
            g.samples.assign(stream.begin() + start, stream.begin() + start + keep);
            out.push_back(std::move(g));
        }
    }
    return out;
}

struct AveragedFrame
{
    std::vector<Iq16> y;
    std::size_t saturations = 0;
};

/// y(i) = sum_m (y_m(i) >> K), I and Q independently, 16-bit saturating adds.
AveragedFrame block_average(std::span<const Iq16> frames, std::int64_t averages, std::int64_t length, int shift);

/// Floating-point reference of the averager, (1/2^K) sum_m y_m(i).
CVec block_average(std::span<const cd> frames, std::int64_t averages, std::int64_t length, int shift);

/// Phasor-sum attenuation of a Doppler shift across the M averaged
/// waveforms, (1/M) sum_{m=1..M} exp(j 2 pi nu m L T_s), in closed form.
template <typename Real = double>
std::complex<Real> doppler_attenuation(Real nu, std::int64_t averages, std::int64_t length, Real sample_period)
{
    using std::sin;
    const Real M = static_cast<Real>(averages);
    // per-waveform phase step reduced to [-pi, pi)
    const Real step = static_cast<Real>(wrap_pi(static_cast<double>(
        static_cast<Real>(kTwoPi) * nu * static_cast<Real>(length) * sample_period)));
    const Real half = step / 2;
    const std::complex<Real> centre = std::polar(Real(1), half * (M + 1));
    const Real den = sin(half);
    if (std::abs(den) < Real(1e-300))
        return centre;
    return centre * (sin(M * half) / (M * den));
}

struct AdcModel
{
    int bits = 12;
    double full_scale = 1.0; // input amplitude mapped to the largest code
};

struct QuantizedStream
{
    std::vector<Iq16> samples;
    std::size_t clipped = 0; // components beyond full scale
};

/// Uniform mid-rise quantizer with clipping; codes are left-aligned into
/// 16 bits.
QuantizedStream quantize(std::span<const cd> w, int bits, double full_scale);

/// Full scale placing the largest I or Q component of `w` at 0.9 of the
/// converter range; 1 for an all-zero input.
double auto_full_scale(std::span<const cd> w);

/// Reconstruction levels of `quantize`; `gain_correction` rescales averaged
/// codes (2^K / M) back to single-capture units.
CVec dequantize(std::span<const Iq16> codes, const AdcModel& adc, double gain_correction = 1.0);

} // namespace sounder

#endif // SOUNDER_DSP_HPP
