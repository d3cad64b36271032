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

#include "sounder/channel.hpp"
#include "sounder/errors.hpp"
#include "sounder/fft.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sounder {

namespace {

using Manifold = Eigen::Matrix<cd, Eigen::Dynamic, 2>;

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_arrays(const std::vector<PanelGeometry>& arrays, const std::vector<int>& n_tx,
                  const std::vector<int>& n_rx)
{
    if (arrays.size() != n_tx.size())
        throw InvalidInput("one array per RF chain is required");
    for (std::size_t p = 0; p < arrays.size(); ++p)
        if (std::max(n_tx[p], n_rx[p]) > arrays[p].size())
            throw InvalidInput("chain " + std::to_string(p) + " switches more antennas than its array holds");
}

void check_delay_spread(const std::vector<Mpc>& mpcs, const SounderConfig& cfg)
{
    if (mpcs.empty())
        return;
    const auto [lo, hi] = std::minmax_element(mpcs.begin(), mpcs.end(),
                                              [](const Mpc& a, const Mpc& b) { return a.delay_s < b.delay_s; });
    const double spread = hi->delay_s - lo->delay_s;
    if (spread > static_cast<double>(cfg.waveform_length) * cfg.sample_period())
        throw AliasingError("delay spread exceeds the waveform period L T_s");
}

struct PathManifolds
{
    std::vector<Manifold> tx;
    std::vector<Manifold> rx;
};

PathManifolds manifolds(const Mpc& mpc, const std::vector<PanelGeometry>& arrays, const std::vector<int>& n_tx,
                        const std::vector<int>& n_rx)
{
    PathManifolds m;
    for (std::size_t p = 0; p < arrays.size(); ++p) {
        m.tx.push_back(arrays[p].manifold(mpc.aod_azimuth, mpc.aod_elevation, n_tx[p]));
        m.rx.push_back(arrays[p].manifold(mpc.aoa_azimuth, mpc.aoa_elevation, n_rx[p]));
    }
    return m;
}

} // namespace

void check_mpc(const Mpc& mpc)
{
    if (!std::isfinite(mpc.delay_s) || mpc.delay_s < 0.0)
        throw InvalidInput("path delay must be finite and non-negative");
    if (!std::isfinite(mpc.doppler_hz))
        throw InvalidInput("path Doppler must be finite");
    for (double el : {mpc.aod_elevation, mpc.aoa_elevation})
        if (!(el >= 0.0 && el <= kPi))
            throw InvalidInput("elevation must lie in [0, pi]");
    for (double az : {mpc.aod_azimuth, mpc.aoa_azimuth})
        if (!std::isfinite(az))
            throw InvalidInput("azimuth must be finite");
    if (!mpc.gamma.allFinite())
        throw InvalidInput("polarimetric gain must be finite");
}

std::uint64_t entry_seed(std::uint64_t master, std::initializer_list<std::int64_t> indices)
{
    std::uint64_t h = splitmix(master);
    for (auto i : indices)
        h = splitmix(h ^ static_cast<std::uint64_t>(i));
    return h;
}

ChannelTensor synth_transfer(const std::vector<Mpc>& mpcs, const std::vector<PanelGeometry>& arrays, const B2bSet& b,
                             const TimestampMap& tmap, const SounderConfig& cfg, const ToneSpec<double>& tones,
                             double noise_power, std::uint64_t seed)
{
    check_config(cfg);
    check_arrays(arrays, cfg.n_tx, cfg.n_rx);
    if (noise_power < 0.0)
        throw InvalidInput("noise power must be non-negative");
    const Eigen::Index K = tones.tone_count();
    if (b.chains() != static_cast<int>(cfg.chain_count()) || b.tones() != K)
        throw CalibrationIncomplete("b2b set does not match the chain count or tone count");

    const int S = tmap.snapshots();
    const int chains = static_cast<int>(cfg.chain_count());
    ChannelTensor out = make_tensor(TensorKind::hardware, S, cfg.n_tx, cfg.n_rx, K);
    out.axis = tones.tone_frequencies(cfg.carrier_hz, cfg.sample_rate_hz);

    for (const auto& mpc : mpcs) {
        check_mpc(mpc);
        const auto m = manifolds(mpc, arrays, cfg.n_tx, cfg.n_rx);
        const CVec delay = (out.axis.array() * (-kTwoPi * mpc.delay_s)).unaryExpr([](double ph) {
            return std::polar(1.0, ph);
        });
        for (int pt = 0; pt < chains; ++pt)
            for (int pr = 0; pr < chains; ++pr) {
                const int nt = cfg.n_tx[static_cast<std::size_t>(pt)];
                const int nr = cfg.n_rx[static_cast<std::size_t>(pr)];
                if (pt == pr || nt == 0 || nr == 0 || !mpc.applies_to(pt, pr))
                    continue;
                const CVec bd = b.at(pt, pr).cwiseProduct(delay);
                const CMat g = m.rx[static_cast<std::size_t>(pr)] * mpc.gamma *
                               m.tx[static_cast<std::size_t>(pt)].transpose();
                for (int s = 0; s < S; ++s)
                    for (int mt = 0; mt < nt; ++mt)
                        for (int mr = 0; mr < nr; ++mr) {
                            const double t = tmap.at(s, pt, pr, mt, mr);
                            const cd c = g(mr, mt) * std::polar(1.0, kTwoPi * mpc.doppler_hz * t);
                            for (Eigen::Index k = 0; k < K; ++k)
                                out.values(s, pt, pr, mt, mr, k) += c * bd(k);
                        }
            }
    }

    // b must cover every measured pair even without paths.
    for (int pt = 0; pt < chains; ++pt)
        for (int pr = 0; pr < chains; ++pr)
            if (pt != pr && cfg.n_tx[static_cast<std::size_t>(pt)] > 0 && cfg.n_rx[static_cast<std::size_t>(pr)] > 0)
                (void)b.at(pt, pr);

    if (noise_power > 0.0) {
        const double sigma = std::sqrt(noise_power / 2.0);
        for (int s = 0; s < S; ++s)
            for (int pt = 0; pt < chains; ++pt)
                for (int pr = 0; pr < chains; ++pr)
                    for (int mt = 0; mt < cfg.n_tx[static_cast<std::size_t>(pt)]; ++mt)
                        for (int mr = 0; mr < cfg.n_rx[static_cast<std::size_t>(pr)]; ++mr) {
                            if (pt == pr)
                                continue;
                            std::mt19937_64 rng(entry_seed(seed, {s, pt, pr, mt, mr}));
                            std::normal_distribution<double> n(0.0, sigma);
                            for (Eigen::Index k = 0; k < K; ++k)
                                out.values(s, pt, pr, mt, mr, k) += cd(n(rng), n(rng));
                        }
    }
    return out;
}

CVec synth_stream(const std::vector<Mpc>& mpcs, const std::vector<PanelGeometry>& arrays, const B2bSet& b,
                  const SounderConfig& cfg, const ChannelPlan& plan, const ToneSpec<double>& tones, double noise_power,
                  int rx_chain, int snapshots, std::uint64_t seed, double start_s)
{
    check_config(cfg);
    check_arrays(arrays, cfg.n_tx, cfg.n_rx);
    check_delay_spread(mpcs, cfg);
    if (snapshots < 1)
        throw InvalidInput("at least one snapshot is required");
    if (rx_chain < 0 || rx_chain >= static_cast<int>(cfg.chain_count()))
        throw InvalidInput("receive chain out of range");
    if (noise_power < 0.0)
        throw InvalidInput("noise power must be non-negative");
    if (tones.length() != cfg.waveform_length)
        throw InvalidInput("tone spec length differs from L");

    const std::int64_t L = cfg.waveform_length;
    const std::int64_t P = cfg.discard;
    const std::int64_t slot_len = plan.slot_samples;
    const std::int64_t period = static_cast<std::int64_t>(plan.size()) * slot_len + cfg.skip;
    const std::int64_t total = (snapshots - 1) * period + static_cast<std::int64_t>(plan.size()) * slot_len;
    const std::int64_t settle =
        std::min<std::int64_t>(slot_len, static_cast<std::int64_t>(std::ceil(cfg.switch_time_s * cfg.sample_rate_hz)));
    const double fs = cfg.sample_rate_hz;
    const VecX<double> freqs = tones.tone_frequencies(cfg.carrier_hz, fs);
    const CVec x = tones.occupied_values();

    CVec out = CVec::Zero(total);
    for (const auto& mpc : mpcs) {
        check_mpc(mpc);
        const auto m = manifolds(mpc, arrays, cfg.n_tx, cfg.n_rx);
        for (const auto& slot : plan.slots) {
            const auto it = std::find_if(slot.rx.begin(), slot.rx.end(),
                                         [&](const AntennaRef& r) { return r.chain == rx_chain; });
            if (it == slot.rx.end() || !mpc.applies_to(slot.tx.chain, rx_chain))
                continue;
            const auto& at = m.tx[static_cast<std::size_t>(slot.tx.chain)];
            const auto& ar = m.rx[static_cast<std::size_t>(rx_chain)];
            const cd g = (ar.row(it->antenna) * mpc.gamma * at.row(slot.tx.antenna).transpose())(0, 0);
            const CVec& bk = b.at(slot.tx.chain, rx_chain);

            CVec spectrum = CVec::Zero(L);
            for (int i = 0; i < tones.tone_count(); ++i)
                spectrum(tones.occupied[static_cast<std::size_t>(i)]) =
                    x(i) * g * bk(i) * std::polar(1.0, -kTwoPi * freqs(i) * mpc.delay_s);
            const CVec r = idft<double>(spectrum);

            for (int s = 0; s < snapshots; ++s) {
                const std::int64_t base = s * period + slot.index * slot_len;
                for (std::int64_t j = settle; j < slot_len; ++j) {
                    const double t = start_s + static_cast<double>(base + j) / fs;
                    const std::int64_t n = ((j - P) % L + L) % L;
                    out(base + j) += r(n) * std::polar(1.0, kTwoPi * mpc.doppler_hz * t);
                }
            }
        }
    }

    if (noise_power > 0.0) {
        std::mt19937_64 rng(entry_seed(seed, {rx_chain, snapshots}));
        std::normal_distribution<double> n(0.0, std::sqrt(noise_power / 2.0));
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out(i) += cd(n(rng), n(rng));
    }
    return out;
}

} // namespace sounder
