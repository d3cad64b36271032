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

#include "catch_amalgamated.hpp"

#include "sounder/calib.hpp"
#include "sounder/channel.hpp"

#include <cmath>
#include <random>

using namespace sounder;
using Catch::Approx;

namespace {

constexpr Eigen::Index kTones = 31;

// Factorizable chains: b(p, q) = t_p(k) r_q(k).
struct Chains
{
    std::vector<CVec> t;
    std::vector<CVec> r;

    CVec b(int p, int q) const
    {
        return t[static_cast<std::size_t>(p)].cwiseProduct(r[static_cast<std::size_t>(q)]);
    }
};

Chains random_chains(int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    Chains c;
    for (int p = 0; p < n; ++p) {
        CVec t(kTones);
        CVec r(kTones);
        for (Eigen::Index k = 0; k < kTones; ++k) {
            t(k) = std::polar(mag(rng), ph(rng));
            r(k) = std::polar(mag(rng), ph(rng));
        }
        c.t.push_back(t);
        c.r.push_back(r);
    }
    return c;
}

B2bSet seeded(const Chains& c, int n)
{
    B2bSet s(n, kTones);
    for (auto [p, q] : required_connections(n)) {
        s.set(p, q, c.b(p, q));
        s.set(q, p, c.b(q, p));
    }
    return s;
}

} // namespace

TEST_CASE("required connections", "[calib]")
{
    CHECK(required_connections(2).size() == 1);
    CHECK(required_connections(9).size() == 15);
    for (int n = 2; n <= 12; ++n)
        CHECK(static_cast<int>(required_connections(n).size()) == 2 * (n - 2) + 1);
    CHECK_THROWS_AS(required_connections(1), InvalidInput);
}

TEST_CASE("completion of factorizable chains is exact", "[calib]")
{
    for (int n : {2, 3, 5, 9}) {
        const auto c = random_chains(n, static_cast<unsigned>(n));
        const auto res = complete_combinations(seeded(c, n));
        CHECK(res.redundant == 0);
        CHECK(res.set.measured_count() == static_cast<std::size_t>(n * (n - 1)));
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                if (p != q) {
                    const CVec want = c.b(p, q);
                    CHECK((res.set.at(p, q) - want).cwiseAbs().maxCoeff() / want.cwiseAbs().minCoeff() < 1e-12);
                }
    }
}

TEST_CASE("redundant measurements report the model residual", "[calib]")
{
    const int n = 4;
    const auto c = random_chains(n, 1);
    auto s = seeded(c, n);
    s.set(2, 3, c.b(2, 3));
    auto res = complete_combinations(s);
    CHECK(res.redundant == 1);
    CHECK(res.residual < 1e-12);

    s.set(3, 2, c.b(3, 2) * 1.1);
    res = complete_combinations(s);
    CHECK(res.redundant == 2);
    CHECK(res.residual == Approx(0.1 / 1.1).epsilon(1e-9));
    CHECK((res.set.at(3, 2) - c.b(3, 2) * 1.1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a missing seed stops the completion", "[calib]")
{
    const int n = 5;
    const auto c = random_chains(n, 2);
    for (auto [p, q] : required_connections(n))
        for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}}) {
            auto s = seeded(c, n);
            s.erase(a, b);
            CHECK_THROWS_AS(complete_combinations(s), IncompleteSeed);
        }
}

TEST_CASE("b2b response through an attenuator", "[calib]")
{
    const auto tones = build_tones(64, kTones, 1);
    const CVec b = CVec::LinSpaced(kTones, 0.2, 1.2).cast<cd>();
    const CVec att = CVec::Constant(kTones, std::pow(10.0, -30.0 / 20.0));
    const CVec y_occ = tones.occupied_values().cwiseProduct(att).cwiseProduct(b);
    CHECK((b2b_response(y_occ, tones, att) - b).cwiseAbs().maxCoeff() < 1e-12);

    CVec y_full = CVec::Zero(64);
    for (int i = 0; i < kTones; ++i)
        y_full(tones.occupied[static_cast<std::size_t>(i)]) = y_occ(i);
    CHECK((b2b_response(y_full, tones, att) - b).cwiseAbs().maxCoeff() < 1e-12);

    CVec dead = att;
    dead(3) = 0.0;
    CHECK_THROWS_AS(b2b_response(y_occ, tones, dead), DegenerateDivision);
    CHECK_THROWS_AS(b2b_response(CVec::Ones(10), tones, att), InvalidInput);
}

TEST_CASE("b2b set bookkeeping", "[calib]")
{
    B2bSet s(3, 4);
    CHECK_FALSE(s.has(0, 1));
    CHECK_THROWS_AS(s.at(0, 1), CalibrationIncomplete);
    CHECK_THROWS_AS(s.set(1, 1, CVec::Ones(4)), InvalidInput);
    CHECK_THROWS_AS(s.set(0, 1, CVec::Ones(3)), InvalidInput);
    CVec z = CVec::Ones(4);
    z(2) = 0.0;
    CHECK_THROWS_AS(s.set(0, 1, z), DegenerateDivision);
    s.set(0, 1, CVec::Ones(4));
    CHECK(s.measured_count() == 1);
    s.erase(0, 1);
    CHECK(s.measured_count() == 0);
    CHECK(B2bSet::identity(3, 4).measured_count() == 6);
}

TEST_CASE("removing the chain responses restores the propagation channel", "[calib]")
{
    SounderConfig cfg;
    cfg.sample_rate_hz = 100e6;
    cfg.waveform_length = 64;
    cfg.tones = kTones;
    cfg.averages = 1;
    cfg.shift = 0;
    cfg.discard = 8;
    cfg.n_tx = {1, 1, 0};
    cfg.n_rx = {1, 2, 2};
    const auto plan = build_schedule(cfg);
    const auto tones = build_tones(64, kTones, 1);
    const std::vector<PanelGeometry> arrays(3, make_panel({0, 0, 0}, 0.0, cfg.carrier_hz));
    const TimestampMap tmap(plan, cfg, 2);
    Mpc m;
    m.delay_s = 40e-9;
    m.doppler_hz = 5.0;
    m.aoa_azimuth = 0.3;
    m.gamma << 0.1, 0.0, 0.0, 0.7;

    const auto c = random_chains(3, 7);
    auto partial = seeded(c, 3);
    const auto full = complete_combinations(partial).set;
    const auto hw = synth_transfer({m}, arrays, full, tmap, cfg, tones, 0.0);
    const auto ideal = synth_transfer({m}, arrays, B2bSet::identity(3, kTones), tmap, cfg, tones, 0.0);
    const auto cal = remove_hardware(hw, full);
    CHECK(cal.kind == TensorKind::calibrated);
    for (Eigen::Index i = 0; i < cal.values.size(); ++i)
        CHECK(std::abs(cal.values.data()[i] - ideal.values.data()[i]) < 1e-12);
    CHECK_THROWS_AS(remove_hardware(cal, full), InvalidInput);
    B2bSet gap = full;
    gap.erase(1, 2);
    CHECK_THROWS_AS(remove_hardware(hw, gap), CalibrationIncomplete);
}
