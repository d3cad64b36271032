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

#include "sounder/errors.hpp"
#include "sounder/schedule.hpp"

#include <map>
#include <set>
#include <tuple>

using namespace sounder;
using Catch::Approx;

namespace {

SounderConfig uplink()
{
    SounderConfig c;
    c.n_tx = {1, 0, 0, 0, 0, 0, 0, 0, 0};
    c.n_rx = {0, 16, 16, 16, 16, 16, 16, 16, 16};
    c.skip = 2221472;
    return c;
}

SounderConfig bidirectional()
{
    SounderConfig c;
    c.n_tx = std::vector<int>(8, 16);
    c.n_rx = std::vector<int>(8, 16);
    c.skip = 14348416;
    return c;
}

using Link = std::tuple<int, int, int, int>;

std::set<Link> covered(const ChannelPlan& plan)
{
    std::set<Link> links;
    for (const auto& s : plan.slots)
        for (const auto& r : s.rx)
            links.insert({s.tx.chain, s.tx.antenna, r.chain, r.antenna});
    return links;
}

} // namespace

TEST_CASE("bidirectional schedule covers every directional pair once", "[schedule]")
{
    const auto plan = build_schedule(bidirectional());
    REQUIRE(plan.size() == 2048);
    std::size_t entries = 0;
    for (const auto& s : plan.slots) {
        CHECK(s.rx.size() == 7);
        for (const auto& r : s.rx)
            CHECK(r.chain != s.tx.chain);
        entries += s.rx.size();
    }
    const auto links = covered(plan);
    CHECK(links.size() == 7168u * 2u);
    CHECK(entries == links.size());
}

TEST_CASE("single link schedule", "[schedule]")
{
    SounderConfig c;
    c.n_tx = {1, 0};
    c.n_rx = {0, 1};
    const auto plan = build_schedule(c);
    REQUIRE(plan.size() == 1);
    CHECK(plan.slots[0].tx == AntennaRef{0, 0});
    REQUIRE(plan.slots[0].rx.size() == 1);
    CHECK(plan.slots[0].rx[0] == AntennaRef{1, 0});
}

TEST_CASE("uplink schedule", "[schedule]")
{
    const auto plan = build_schedule(uplink());
    CHECK(plan.size() == 16);
    CHECK(covered(plan).size() == 128);
    CHECK(plan.slot_of(0, 0, 3, 5) == 5);
    CHECK_THROWS_AS(plan.slot_of(1, 0, 3, 5), InvalidInput);
    CHECK_THROWS_AS(plan.slot_of(0, 0, 0, 0), InvalidInput);
}

TEST_CASE("uneven receive counts idle surplus positions", "[schedule]")
{
    SounderConfig c;
    c.n_tx = {2, 1, 0};
    c.n_rx = {1, 3, 2};
    const auto plan = build_schedule(c);
    CHECK(plan.size() == 9);
    std::map<int, int> per_chain;
    for (const auto& s : plan.slots)
        for (const auto& r : s.rx) {
            CHECK(r.antenna == s.rx_position);
            ++per_chain[r.chain];
        }
    const auto cnt = count_channels(c.n_tx, c.n_rx);
    CHECK(static_cast<std::int64_t>(covered(plan).size()) == cnt.total);
    for (int pt = 0; pt < 3; ++pt)
        for (int mt = 0; mt < c.n_tx[static_cast<std::size_t>(pt)]; ++mt)
            for (int pr = 0; pr < 3; ++pr)
                for (int mr = 0; pr != pt && mr < c.n_rx[static_cast<std::size_t>(pr)]; ++mr) {
                    const auto& slot = plan.slots[static_cast<std::size_t>(plan.slot_of(pt, mt, pr, mr))];
                    CHECK(slot.tx == AntennaRef{pt, mt});
                    CHECK(std::count(slot.rx.begin(), slot.rx.end(), AntennaRef{pr, mr}) == 1);
                }
}

TEST_CASE("empty plans are rejected", "[schedule]")
{
    SounderConfig c;
    c.n_tx = {0, 0};
    c.n_rx = {0, 4};
    CHECK_THROWS_AS(build_schedule(c), EmptyPlan);
    c.n_tx = {1, 0};
    c.n_rx = {0, 0};
    CHECK_THROWS_AS(build_schedule(c), EmptyPlan);
}

TEST_CASE("skip samples realize the repetition interval", "[schedule]")
{
    CHECK(compute_skip(uplink(), 5e-3) == 2221472);
    CHECK(compute_skip(bidirectional(), 0.1) == 14348416);

    SounderConfig c = uplink();
    const double tight = 16.0 * static_cast<double>(c.slot_samples()) / c.sample_rate_hz;
    CHECK(compute_skip(c, tight) == 0);
    CHECK_THROWS_AS(compute_skip(c, 0.5 * tight), Infeasible);
}

TEST_CASE("timestamps", "[schedule]")
{
    const auto c = uplink();
    const auto plan = build_schedule(c);
    const TimestampMap t(plan, c, 3);
    const double Ts = c.sample_period();
    CHECK(t.repetition_interval() == Approx(5e-3).epsilon(1e-15));
    CHECK(t.slot_time(0, 0) == Approx(9216 * Ts));
    CHECK(t.slot_time(1, 0) == Approx(5e-3 + 9216 * Ts).epsilon(1e-15));
    CHECK(t.slot_time(0, 15) == Approx((15.0 * 17408 + 9216) * Ts));
    CHECK(t.at(2, 0, 4, 0, 7) == Approx(t.slot_time(2, 7)));
    CHECK_THROWS_AS(t.slot_time(3, 0), InvalidInput);

    const TimestampMap shifted(plan, c, 1, 2.5);
    CHECK(shifted.slot_time(0, 0) - 2.5 == Approx(9216 * Ts));
}

TEST_CASE("switch timeline", "[schedule]")
{
    const auto c = uplink();
    const auto plan = build_schedule(c);
    const auto tl = switch_timeline(plan, c);
    CHECK(tl.switch_rate_hz == Approx(500e6 / 17408.0));
    CHECK(tl.warnings.empty());
    CHECK(tl.events.size() == 16u * 9u);

    SounderConfig one;
    one.n_tx = {1, 0, 0};
    one.n_rx = {0, 1, 1};
    const auto single = switch_timeline(build_schedule(one), one);
    int rx_events = 0;
    for (const auto& e : single.events)
        rx_events += e.mode == SwitchMode::receive ? 1 : 0;
    CHECK(rx_events == 2);

    SounderConfig fast = uplink();
    fast.discard = 0;
    fast.averages = 5;
    fast.waveform_length = 1000; // 10 us slots
    const auto warn = switch_timeline(build_schedule(fast), fast);
    CHECK(warn.switch_rate_hz == Approx(100e3));
    CHECK(warn.warnings.size() == 1);
}
