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

#include "sounder/estimate.hpp"
#include "sounder/errors.hpp"
#include "sounder/fft.hpp"

#include <cmath>
#include <limits>

namespace sounder {

namespace {

template <typename Fn>
void for_each_measured(const ChannelTensor& t, Fn&& fn)
{
    const int chains = static_cast<int>(t.chains());
    for (int pt = 0; pt < chains; ++pt)
        for (int pr = 0; pr < chains; ++pr) {
            if (pt == pr)
                continue;
            for (int mt = 0; mt < t.n_tx[static_cast<std::size_t>(pt)]; ++mt)
                for (int mr = 0; mr < t.n_rx[static_cast<std::size_t>(pr)]; ++mr)
                    fn(pt, pr, mt, mr);
        }
}

bool in_angle(double x, const Interval& iv)
{
    if (iv.lo > iv.hi)
        return false;
    if (iv.hi - iv.lo >= kTwoPi)
        return true;
    const double off = std::fmod(std::fmod(x - iv.lo, kTwoPi) + kTwoPi, kTwoPi);
    return off <= iv.hi - iv.lo + 1e-12;
}

bool in_range(double x, const Interval& iv) { return x >= iv.lo && x <= iv.hi; }

} // namespace

TransferResult transfer_function(const ChannelTensor& d, const ToneSpec<double>& tones, const SounderConfig& cfg)
{
    if (d.kind != TensorKind::raw)
        throw InvalidInput("transfer_function expects a raw sample tensor");
    if (d.bins() != tones.length())
        throw InvalidInput("raw tensor length differs from the waveform length");
    TransferResult r;
    const auto S = static_cast<int>(d.snapshots());
    r.y = make_tensor(TensorKind::spectral, S, d.n_tx, d.n_rx, tones.length());
    r.h = make_tensor(TensorKind::hardware, S, d.n_tx, d.n_rx, tones.tone_count());
    r.h.axis = tones.tone_frequencies(cfg.carrier_hz, cfg.sample_rate_hz);
    const CVec x = tones.occupied_values();
    for (int s = 0; s < S; ++s)
        for_each_measured(d, [&](int pt, int pr, int mt, int mr) {
            const CVec y = dft<double>(d.row(s, pt, pr, mt, mr));
            r.y.set_row(s, pt, pr, mt, mr, y);
            r.h.set_row(s, pt, pr, mt, mr, tones.gather(y).cwiseQuotient(x));
        });
    return r;
}

std::size_t capture_raw(ChannelTensor& d, std::span<const Iq16> stream, const SounderConfig& cfg,
                        const ChannelPlan& plan, int rx_chain, const AdcModel& adc)
{
    const auto groups = frame_stream<Iq16>(stream, cfg, plan, rx_chain, static_cast<int>(d.snapshots()));
    const double gain = std::ldexp(1.0, cfg.shift) / static_cast<double>(cfg.averages);
    std::size_t saturations = 0;
    for (const auto& g : groups) {
        const auto avg = block_average(g.samples, cfg.averages, cfg.waveform_length, cfg.shift);
        saturations += avg.saturations;
        d.set_row(g.snapshot, g.tx.chain, g.rx.chain, g.tx.antenna, g.rx.antenna, dequantize(avg.y, adc, gain));
    }
    return saturations;
}

void capture_raw(ChannelTensor& d, std::span<const cd> stream, const SounderConfig& cfg, const ChannelPlan& plan,
                 int rx_chain)
{
    const auto groups = frame_stream<cd>(stream, cfg, plan, rx_chain, static_cast<int>(d.snapshots()));
    const double gain = std::ldexp(1.0, cfg.shift) / static_cast<double>(cfg.averages);
    for (const auto& g : groups)
        d.set_row(g.snapshot, g.tx.chain, g.rx.chain, g.tx.antenna, g.rx.antenna,
                  block_average(g.samples, cfg.averages, cfg.waveform_length, cfg.shift) * gain);
}

MatX<double> narrowband_gain(const ChannelTensor& h, Eigen::Index k0)
{
    if (k0 < 0 || k0 >= h.bins())
        throw InvalidInput("bin index outside the tensor");
    Eigen::Index links = 0;
    for_each_measured(h, [&](int, int, int, int) { ++links; });
    MatX<double> g(h.snapshots(), links);
    for (Eigen::Index s = 0; s < h.snapshots(); ++s) {
        Eigen::Index c = 0;
        for_each_measured(h, [&](int pt, int pr, int mt, int mr) {
            g(s, c++) = 20.0 * std::log10(std::abs(h.values(s, pt, pr, mt, mr, k0)));
        });
    }
    return g;
}

VecX<double> mrc_combine(const ChannelTensor& h, Eigen::Index k0)
{
    if (k0 < 0 || k0 >= h.bins())
        throw InvalidInput("bin index outside the tensor");
    VecX<double> out(h.snapshots());
    for (Eigen::Index s = 0; s < h.snapshots(); ++s) {
        double p = 0.0;
        for_each_measured(h, [&](int pt, int pr, int mt, int mr) {
            p += std::norm(h.values(s, pt, pr, mt, mr, k0));
        });
        out(s) = 10.0 * std::log10(p);
    }
    return out;
}

bool SubspaceBounds::contains(const PathEstimate& p) const
{
    const Mpc& m = p.mpc;
    return (!delay_s || in_range(m.delay_s, *delay_s)) && (!doppler_hz || in_range(m.doppler_hz, *doppler_hz)) &&
           (!aod_azimuth || in_angle(m.aod_azimuth, *aod_azimuth)) &&
           (!aod_elevation || in_range(m.aod_elevation, *aod_elevation)) &&
           (!aoa_azimuth || in_angle(m.aoa_azimuth, *aoa_azimuth)) &&
           (!aoa_elevation || in_range(m.aoa_elevation, *aoa_elevation)) &&
           (!power_db || in_range(p.power_db, *power_db));
}

std::vector<PathEstimate> subspace_filter(const std::vector<PathEstimate>& paths, const SubspaceBounds& bounds)
{
    std::vector<PathEstimate> out;
    for (const auto& p : paths)
        if (bounds.contains(p))
            out.push_back(p);
    return out;
}

std::optional<Eigen::Vector2d> intersect_bearings(const Eigen::Vector2d& p1, double phi1, const Eigen::Vector2d& p2,
                                                  double phi2)
{
    const Eigen::Vector2d d1(std::cos(phi1), std::sin(phi1));
    const Eigen::Vector2d d2(std::cos(phi2), std::sin(phi2));
    const double det = d1.x() * (-d2.y()) - d1.y() * (-d2.x());
    if (std::abs(det) < 1e-12)
        return std::nullopt;
    const Eigen::Vector2d rhs = p2 - p1;
    const double t = (rhs.x() * (-d2.y()) - rhs.y() * (-d2.x())) / det;
    const double u = (d1.x() * rhs.y() - d1.y() * rhs.x()) / det;
    const double tol = 1e-12 * std::max(1.0, rhs.norm());
    if (t < -tol || u < -tol)
        return std::nullopt;
    return Eigen::Vector2d(p1 + t * d1);
}

double bearing_to(const Eigen::Vector2d& origin, const Eigen::Vector2d& target)
{
    const Eigen::Vector2d v = target - origin;
    return std::atan2(v.y(), v.x());
}

} // namespace sounder
