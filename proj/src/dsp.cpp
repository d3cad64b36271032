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

#include "sounder/dsp.hpp"

#include <cmath>
#include <limits>

namespace sounder {

namespace {

constexpr std::int32_t kMax16 = std::numeric_limits<std::int16_t>::max();
constexpr std::int32_t kMin16 = std::numeric_limits<std::int16_t>::min();

std::int16_t saturating_add(std::int16_t acc, std::int32_t addend, std::size_t& saturations)
{
    std::int32_t sum = std::int32_t{acc} + addend;
    if (sum > kMax16) {
        ++saturations;
        sum = kMax16;
    } else if (sum < kMin16) {
        ++saturations;
        sum = kMin16;
    }
    return static_cast<std::int16_t>(sum);
}

void check_frames(std::size_t size, std::int64_t averages, std::int64_t length)
{
    if (averages < 1 || length < 1)
        throw InvalidInput("averager needs M >= 1 and L >= 1");
    if (static_cast<std::int64_t>(size) != averages * length)
        throw InvalidInput("averager input must hold exactly M * L samples");
}

} // namespace

AveragedFrame block_average(std::span<const Iq16> frames, std::int64_t averages, std::int64_t length, int shift)
{
    check_frames(frames.size(), averages, length);
    if (shift < 0 || shift > 15)
        throw InvalidInput("shift must lie in [0, 15]");

    AveragedFrame out;
    out.y.assign(static_cast<std::size_t>(length), Iq16{});
    for (std::int64_t m = 0; m < averages; ++m) {
        const auto frame = frames.subspan(static_cast<std::size_t>(m * length), static_cast<std::size_t>(length));
        for (std::size_t i = 0; i < frame.size(); ++i) {
            // >> on negative values is arithmetic (floor) since C++20
            const std::int32_t re = std::int32_t{frame[i].i} >> shift;
            const std::int32_t im = std::int32_t{frame[i].q} >> shift;
            out.y[i].i = saturating_add(out.y[i].i, re, out.saturations);
            out.y[i].q = saturating_add(out.y[i].q, im, out.saturations);
        }
    }
    return out;
}

CVec block_average(std::span<const cd> frames, std::int64_t averages, std::int64_t length, int shift)
{
    check_frames(frames.size(), averages, length);
    CVec y = CVec::Zero(length);
    for (std::int64_t m = 0; m < averages; ++m)
        y += Eigen::Map<const CVec>(frames.data() + m * length, length);
    return y / std::ldexp(1.0, shift);
}

QuantizedStream quantize(std::span<const cd> w, int bits, double full_scale)
{
    if (bits < 2 || bits > 16)
        throw InvalidInput("quantizer depth must lie in [2, 16] bits");
    if (!(full_scale > 0.0))
        throw InvalidInput("full scale must be positive");

    const std::int32_t levels = std::int32_t{1} << (bits - 1);
    const double step = full_scale / static_cast<double>(levels);
    const int align = 16 - bits;

    QuantizedStream out;
    out.samples.resize(w.size());
    auto code = [&](double v) {
        if (std::abs(v) > full_scale)
            ++out.clipped;
        double n = std::floor(v / step);
        n = std::clamp(n, -static_cast<double>(levels), static_cast<double>(levels - 1));
        return static_cast<std::int16_t>(static_cast<std::int32_t>(n) * (std::int32_t{1} << align));
    };
    for (std::size_t n = 0; n < w.size(); ++n)
        out.samples[n] = {code(w[n].real()), code(w[n].imag())};
    return out;
}

CVec dequantize(std::span<const Iq16> codes, const AdcModel& adc, double gain_correction)
{
    const double step = adc.full_scale / std::ldexp(1.0, adc.bits - 1);
    const double lsb = std::ldexp(1.0, 16 - adc.bits);
    CVec out(static_cast<Eigen::Index>(codes.size()));
    for (std::size_t n = 0; n < codes.size(); ++n) {
        const double re = (gain_correction * codes[n].i / lsb + 0.5) * step;
        const double im = (gain_correction * codes[n].q / lsb + 0.5) * step;
        out(static_cast<Eigen::Index>(n)) = {re, im};
    }
    return out;
}

double auto_full_scale(std::span<const cd> w)
{
    double peak = 0.0;
    for (const auto& v : w)
        peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
    return peak > 0.0 ? peak / 0.9 : 1.0;
}

} // namespace sounder
