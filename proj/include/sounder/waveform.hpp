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

// Multi-tone Zadoff-Chu sounding waveform: frequency-domain design and
// time-domain synthesis.

#ifndef SOUNDER_WAVEFORM_HPP
#define SOUNDER_WAVEFORM_HPP

#include "sounder/errors.hpp"
#include "sounder/fft.hpp"
#include "sounder/types.hpp"

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace sounder {

/// Complex tone amplitudes x(k) over the L DFT bins.
///
/// `occupied` lists the DFT bins carrying a tone in ascending baseband
/// frequency; `offsets` holds the matching signed bin indices, so tone i
/// sits at baseband frequency offsets[i] * f_s / L.
template <typename Real = double>
struct ToneSpec
{
    CVecX<Real> x;
    std::vector<int> occupied;
    std::vector<int> offsets;
    int zc_root = 1;
    int zc_length = 1;

    int length() const { return static_cast<int>(x.size()); }
    int tone_count() const { return static_cast<int>(occupied.size()); }

    /// Tone amplitudes restricted to the occupied bins, in tone order.
    CVecX<Real> occupied_values() const
    {
        CVecX<Real> v(tone_count());
        for (int i = 0; i < tone_count(); ++i)
            v(i) = x(occupied[static_cast<std::size_t>(i)]);
        return v;
    }

    /// Values of a length-L spectrum on the occupied bins.
    CVecX<Real> gather(const CVecX<Real>& spectrum) const
    {
        CVecX<Real> v(tone_count());
        for (int i = 0; i < tone_count(); ++i)
            v(i) = spectrum(occupied[static_cast<std::size_t>(i)]);
        return v;
    }

    /// Absolute RF frequency of each occupied tone.
    VecX<double> tone_frequencies(double carrier_hz, double sample_rate_hz) const
    {
        VecX<double> f(tone_count());
        for (int i = 0; i < tone_count(); ++i)
            f(i) = carrier_hz + offsets[static_cast<std::size_t>(i)] * sample_rate_hz / length();
        return f;
    }
};

template <typename Real = double>
struct TimeWaveform
{
    CVecX<Real> s;
    double sample_rate_hz = 1.0;
};

/// Zadoff-Chu sequence of length n with root u.
///
/// Phases are reduced with integer arithmetic before the exponential so
/// long sequences keep full precision.
template <typename Real = double>
CVecX<Real> zadoff_chu(int n, int u)
{
    if (n < 1)
        throw InvalidInput("Zadoff-Chu length must be >= 1");
    if (n == 1)
        return CVecX<Real>::Ones(1);
    if (u < 1 || u >= n || std::gcd(u, n) != 1)
        throw InvalidRoot("Zadoff-Chu root " + std::to_string(u) + " is not coprime with length " +
                          std::to_string(n) + " or out of range");

    CVecX<Real> z(n);
    const std::int64_t N = n;
    for (std::int64_t k = 0; k < N; ++k) {
        // odd n:  exp(-j pi u k(k+1)/n) = exp(-j 2 pi (u k(k+1)/2 mod n) / n)
        // even n: exp(-j pi u k^2 / n)  = exp(-j 2 pi (u k^2 mod 2n) / 2n)
        std::int64_t num;
        std::int64_t den;
        if (N % 2 == 1) {
            const std::int64_t tri = ((k * (k + 1)) / 2) % N;
            num = (static_cast<std::int64_t>(u) * tri) % N;
            den = N;
        } else {
            const std::int64_t sq = (k * k) % (2 * N);
            num = (static_cast<std::int64_t>(u) * sq) % (2 * N);
            den = 2 * N;
        }
        const Real phase = -static_cast<Real>(kTwoPi) * static_cast<Real>(num) / static_cast<Real>(den);
        z(k) = std::polar(Real(1), phase);
    }
    return z;
}

/// Places a length-F Zadoff-Chu sequence on F contiguous bins around DC.
///
/// The band spans signed bins [-floor(F/2), F - 1 - floor(F/2)]: DC is
/// occupied and an even F puts its unpaired bin on the negative side.
/// Element q of the sequence lands on the q-th lowest occupied bin.
template <typename Real = double>
ToneSpec<Real> build_tones(int L, int F, int u)
{
    if (L < 1)
        throw InvalidInput("waveform length must be >= 1");
    if (F < 1 || F > L)
        throw InvalidInput("tone count must satisfy 1 <= F <= L");

    const CVecX<Real> zc = zadoff_chu<Real>(F, u);
    ToneSpec<Real> t;
    t.x = CVecX<Real>::Zero(L);
    t.zc_root = u;
    t.zc_length = F;
    const int first = -(F / 2);
    for (int q = 0; q < F; ++q) {
        const int offset = first + q;
        const int bin = unsigned_bin(offset, L);
        t.x(bin) = zc(q);
        t.occupied.push_back(bin);
        t.offsets.push_back(offset);
    }
    return t;
}

/// s(n) = (1/L) sum_k x(k) exp(j 2 pi k n / L)
template <typename Real = double>
TimeWaveform<Real> synthesize(const ToneSpec<Real>& tones, double sample_rate_hz = 1.0)
{
    return {idft<Real>(tones.x), sample_rate_hz};
}

/// Peak-to-average power ratio (dB) of the waveform interpolated by
/// zero-padding its spectrum to `oversample` times the length.
template <typename Real = double>
double papr(const TimeWaveform<Real>& w, int oversample = 1)
{
    if (oversample < 1)
        throw InvalidInput("oversampling factor must be >= 1");
    const int L = static_cast<int>(w.s.size());
    if (L == 0 || w.s.squaredNorm() == Real(0))
        throw Undefined("PAPR of a zero-energy waveform is undefined");

    CVecX<Real> up;
    if (oversample == 1) {
        up = w.s;
    } else {
        const CVecX<Real> X = dft<Real>(w.s);
        const int N = L * oversample;
        CVecX<Real> Y = CVecX<Real>::Zero(N);
        for (int k = 0; k < L; ++k)
            Y(unsigned_bin(signed_bin(k, L), N)) = X(k);
        up = idft<Real>(Y);
    }
    const VecX<Real> p = up.cwiseAbs2();
    return 10.0 * std::log10(static_cast<double>(p.maxCoeff() / p.mean()));
}

} // namespace sounder

#endif // SOUNDER_WAVEFORM_HPP
