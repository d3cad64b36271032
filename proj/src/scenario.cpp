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

#include "sounder/scenario.hpp"
#include "sounder/errors.hpp"
#include "sounder/schedule.hpp"

#include <set>
#include <sstream>

namespace sounder {

namespace fs = std::filesystem;

namespace {

// Reads an object while recording which keys were consumed.
class Reader
{
public:
    Reader(const Json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object())
            throw SchemaError(where_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    template <typename T>
    T get(const char* key)
    {
        if (!j_.contains(key))
            throw SchemaError(where_ + ": missing required key '" + key + "'");
        return convert<T>(key);
    }

    template <typename T>
    T get(const char* key, const T& fallback)
    {
        return j_.contains(key) ? convert<T>(key) : fallback;
    }

    template <typename T>
    std::optional<T> opt(const char* key)
    {
        if (!j_.contains(key))
            return std::nullopt;
        return convert<T>(key);
    }

    const Json& raw(const char* key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string path(const char* key) const { return where_ + "." + key; }

    void finish() const
    {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k))
                throw SchemaError(where_ + ": unknown key '" + k + "'");
    }

private:
    template <typename T>
    T convert(const char* key)
    {
        seen_.insert(key);
        try {
            return j_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(where_ + "." + key + ": " + e.what());
        }
    }

    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Eigen::Vector3d vec3(Reader& r, const char* key)
{
    const auto v = r.get<std::vector<double>>(key);
    if (v.size() != 3)
        throw SchemaError(r.path(key) + ": expected three coordinates");
    return {v[0], v[1], v[2]};
}

cd complex_value(const Json& j, const std::string& where)
{
    try {
        if (j.is_number())
            return {j.get<double>(), 0.0};
        const auto v = j.get<std::vector<double>>();
        if (v.size() != 2)
            throw SchemaError(where + ": complex values are [re, im]");
        return {v[0], v[1]};
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

Polarization polarization(const std::string& s, const std::string& where)
{
    if (s == "V" || s == "v")
        return Polarization::vertical;
    if (s == "H" || s == "h")
        return Polarization::horizontal;
    throw SchemaError(where + ": polarization must be 'H' or 'V'");
}

SounderConfig parse_sounder(const Json& j, std::optional<double>& repetition)
{
    Reader r(j, "sounder");
    SounderConfig c;
    c.carrier_hz = r.get("carrier_hz", c.carrier_hz);
    c.sample_rate_hz = r.get("sample_rate_hz", c.sample_rate_hz);
    c.waveform_length = r.get("waveform_length", c.waveform_length);
    c.tones = r.get("tones", c.tones);
    c.averages = r.get("averages", c.averages);
    c.shift = r.get("shift", c.shift);
    c.discard = r.get("discard", c.discard);
    c.skip = r.get("skip", c.skip);
    repetition = r.opt<double>("repetition_s");
    c.n_tx = r.get<std::vector<int>>("n_tx");
    c.n_rx = r.get<std::vector<int>>("n_rx");
    c.switch_time_s = r.get("switch_time_s", c.switch_time_s);
    c.adc_bits = r.get("adc_bits", c.adc_bits);
    c.tx_power_dbm = r.get("tx_power_dbm", c.tx_power_dbm);
    c.noise_figure_db = r.get("noise_figure_db", c.noise_figure_db);
    c.chains_per_host = r.get("chains_per_host", c.chains_per_host);
    c.zc_root = r.get("zc_root", c.zc_root);
    r.finish();
    if (repetition && j.contains("skip"))
        throw SchemaError("sounder: give either 'skip' or 'repetition_s', not both");
    try {
        check_config(c);
        if (repetition)
            c.skip = compute_skip(c, *repetition);
    } catch (const InvalidInput& e) {
        throw SchemaError(std::string("sounder: ") + e.what());
    }
    return c;
}

Mpc parse_path(const Json& j, const std::string& where)
{
    Reader r(j, where);
    Mpc m;
    m.delay_s = r.get("delay_s", 0.0);
    m.doppler_hz = r.get("doppler_hz", 0.0);
    m.aod_azimuth = wrap_pi(deg2rad(r.get("aod_azimuth_deg", 0.0)));
    m.aod_elevation = deg2rad(r.get("aod_elevation_deg", 90.0));
    m.aoa_azimuth = wrap_pi(deg2rad(r.get("aoa_azimuth_deg", 0.0)));
    m.aoa_elevation = deg2rad(r.get("aoa_elevation_deg", 90.0));
    m.tx_chain = r.get("tx_chain", -1);
    m.rx_chain = r.get("rx_chain", -1);
    if (r.has("gain_db")) {
        const double g = std::pow(10.0, r.get<double>("gain_db") / 20.0);
        const double phase = deg2rad(r.get("phase_deg", 0.0));
        m.gamma = Eigen::Matrix2cd::Identity() * std::polar(g, phase);
    }
    if (r.has("gamma")) {
        Reader g(r.raw("gamma"), where + ".gamma");
        const char* keys[2][2] = {{"hh", "hv"}, {"vh", "vv"}};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (g.has(keys[a][b]))
                    m.gamma(a, b) = complex_value(g.raw(keys[a][b]), where + ".gamma." + keys[a][b]);
        g.finish();
    }
    r.finish();
    try {
        check_mpc(m);
    } catch (const InvalidInput& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return m;
}

SageSettings parse_sage(const Json& j)
{
    Reader r(j, "estimate");
    SageSettings s;
    s.max_paths = r.get("max_paths", s.max_paths);
    s.max_iterations = r.get("max_iterations", s.max_iterations);
    s.convergence = r.get("convergence", s.convergence);
    s.dynamic_range_db = r.get("dynamic_range_db", s.dynamic_range_db);
    s.detection_factor = r.get("detection_factor", s.detection_factor);
    s.delay_step_s = r.get("delay_step_s", s.delay_step_s);
    s.doppler_step_hz = r.get("doppler_step_hz", s.doppler_step_hz);
    s.angle_step_deg = r.get("angle_step_deg", s.angle_step_deg);
    s.refine_levels = r.get("refine_levels", s.refine_levels);
    s.refine_factor = r.get("refine_factor", s.refine_factor);
    s.azimuth_span_deg = r.get("azimuth_span_deg", s.azimuth_span_deg);
    s.first_snapshot = r.get("first_snapshot", s.first_snapshot);
    s.snapshots = r.get("snapshots", s.snapshots);
    r.finish();
    return s;
}

CalibrateOptions parse_calibrate(const Json& j, const fs::path& base)
{
    Reader r(j, "calibrate");
    CalibrateOptions c;
    if (r.has("captures")) {
        const Json& list = r.raw("captures");
        if (!list.is_array())
            throw SchemaError("calibrate.captures: expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            Reader cr(list[i], "calibrate.captures[" + std::to_string(i) + "]");
            B2bCapture cap;
            cap.tx_chain = cr.get<int>("tx_chain");
            cap.rx_chain = cr.get<int>("rx_chain");
            cap.file = base / cr.get<std::string>("file");
            cr.finish();
            c.captures.push_back(cap);
        }
    }
    if (auto f = r.opt<std::string>("attenuator_file"))
        c.attenuator_file = base / *f;
    c.attenuation_db = r.get("attenuation_db", c.attenuation_db);
    if (r.has("synthetic")) {
        Reader sr(r.raw("synthetic"), "calibrate.synthetic");
        SyntheticChains s;
        s.ripple_db = sr.get("ripple_db", s.ripple_db);
        s.group_delay_s = sr.get("group_delay_s", s.group_delay_s);
        sr.finish();
        c.synthetic = s;
    }
    r.finish();
    return c;
}

Interval degrees(const std::vector<double>& v, const std::string& where, bool angle)
{
    if (v.size() != 2)
        throw SchemaError(where + ": bounds are [lo, hi]");
    return angle ? Interval{deg2rad(v[0]), deg2rad(v[1])} : Interval{v[0], v[1]};
}

} // namespace

Scenario parse_scenario(const Json& doc, const fs::path& base_dir)
{
    Reader r(doc, "scenario");
    Scenario sc;
    sc.base_dir = base_dir;
    sc.name = r.get<std::string>("name", "scenario");
    sc.cfg = parse_sounder(r.raw("sounder"), sc.repetition_s);

    if (r.has("scene_bounds")) {
        Reader b(r.raw("scene_bounds"), "scene_bounds");
        sc.bounds.first_delay_max_s = b.get("first_delay_max_s", 0.0);
        sc.bounds.delay_spread_max_s = b.get("delay_spread_max_s", 0.0);
        b.finish();
    }

    if (r.has("arrays")) {
        const Json& list = r.raw("arrays");
        if (!list.is_array())
            throw SchemaError("arrays: expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "arrays[" + std::to_string(i) + "]";
            Reader a(list[i], where);
            ArraySpec s;
            s.type = a.get<std::string>("type", "panel");
            if (s.type != "panel" && s.type != "dipole" && s.type != "isotropic")
                throw SchemaError(where + ".type: expected panel, dipole or isotropic");
            s.position_m = a.has("position_m") ? vec3(a, "position_m") : Eigen::Vector3d::Zero();
            s.yaw_deg = a.get("yaw_deg", 0.0);
            s.polarization = polarization(a.get<std::string>("polarization", "V"), where + ".polarization");
            a.finish();
            sc.arrays.push_back(s);
        }
        if (sc.arrays.size() != sc.cfg.chain_count())
            throw SchemaError("arrays: one entry per RF chain is required");
    }

    if (r.has("scene")) {
        Reader s(r.raw("scene"), "scene");
        if (s.has("paths")) {
            const Json& list = s.raw("paths");
            if (!list.is_array())
                throw SchemaError("scene.paths: expected an array");
            for (std::size_t i = 0; i < list.size(); ++i)
                sc.paths.push_back(parse_path(list[i], "scene.paths[" + std::to_string(i) + "]"));
        }
        if (s.has("los")) {
            const Json& list = s.raw("los");
            if (!list.is_array())
                throw SchemaError("scene.los: expected an array");
            for (std::size_t i = 0; i < list.size(); ++i) {
                Reader l(list[i], "scene.los[" + std::to_string(i) + "]");
                LosSpec los;
                los.tx_chain = l.get<int>("tx_chain");
                los.rx_chain = l.get<int>("rx_chain");
                los.gain_db = l.opt<double>("gain_db");
                los.doppler_hz = l.get("doppler_hz", 0.0);
                l.finish();
                sc.los.push_back(los);
            }
        }
        s.finish();
    }

    if (r.has("noise")) {
        Reader n(r.raw("noise"), "noise");
        if (n.has("power") && n.has("snr_db"))
            throw SchemaError("noise: give either 'power' or 'snr_db'");
        sc.noise_power = n.get("power", 0.0);
        if (auto snr = n.opt<double>("snr_db"))
            sc.noise_power = std::pow(10.0, -*snr / 10.0);
        n.finish();
        if (sc.noise_power < 0.0)
            throw SchemaError("noise.power: must be non-negative");
    }
    sc.seed = r.get<std::uint64_t>("seed", sc.seed);

    if (r.has("simulate")) {
        Reader s(r.raw("simulate"), "simulate");
        sc.snapshots = s.get("snapshots", sc.snapshots);
        sc.stream_chains = s.get("stream_chains", sc.stream_chains);
        s.finish();
        if (sc.snapshots < 1)
            throw SchemaError("simulate.snapshots: must be >= 1");
    }
    if (r.has("estimate")) {
        const Json& e = r.raw("estimate");
        Json sage = e;
        if (e.is_object() && e.contains("subspace")) {
            sc.subspace = parse_subspace(e["subspace"].get<std::string>());
            sage.erase("subspace");
        }
        sc.sage = parse_sage(sage);
    }
    if (r.has("calibrate"))
        sc.calibrate = parse_calibrate(r.raw("calibrate"), base_dir);
    r.finish();

    for (const auto& l : sc.los) {
        const auto n = static_cast<int>(sc.cfg.chain_count());
        if (l.tx_chain < 0 || l.tx_chain >= n || l.rx_chain < 0 || l.rx_chain >= n || l.tx_chain == l.rx_chain)
            throw SchemaError("scene.los: chain indices out of range");
        if (sc.arrays.empty())
            throw SchemaError("scene.los: needs the arrays block");
    }
    return sc;
}

Scenario load_scenario(const fs::path& file)
{
    Json doc;
    try {
        doc = Json::parse(read_text(file));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(file.string() + ": " + e.what());
    }
    return parse_scenario(doc, file.parent_path());
}

std::vector<PanelGeometry> build_arrays(const Scenario& sc)
{
    std::vector<PanelGeometry> out;
    if (sc.arrays.empty()) {
        for (std::size_t p = 0; p < sc.cfg.chain_count(); ++p)
            out.push_back(make_isotropic(Eigen::Vector3d::Zero(), sc.cfg.carrier_hz));
        return out;
    }
    for (const auto& a : sc.arrays) {
        if (a.type == "panel")
            out.push_back(make_panel(a.position_m, deg2rad(a.yaw_deg), sc.cfg.carrier_hz));
        else if (a.type == "dipole") {
            out.push_back(make_dipole(a.position_m, sc.cfg.carrier_hz));
            out.back().rotation = yaw_rotation(deg2rad(a.yaw_deg));
        } else {
            out.push_back(make_isotropic(a.position_m, sc.cfg.carrier_hz, a.polarization));
            out.back().rotation = yaw_rotation(deg2rad(a.yaw_deg));
        }
    }
    return out;
}

std::vector<Mpc> scene_paths(const Scenario& sc, const std::vector<PanelGeometry>& arrays)
{
    std::vector<Mpc> out = sc.paths;
    for (const auto& l : sc.los) {
        const auto& tx = arrays[static_cast<std::size_t>(l.tx_chain)];
        const auto& rx = arrays[static_cast<std::size_t>(l.rx_chain)];
        const Eigen::Vector3d d = rx.center - tx.center;
        const double dist = d.norm();
        if (dist <= 0.0)
            throw SchemaError("scene.los: arrays share a position");
        Mpc m;
        m.delay_s = dist / kSpeedOfLight;
        m.doppler_hz = l.doppler_hz;
        std::tie(m.aod_azimuth, m.aod_elevation) = angles_of(d);
        std::tie(m.aoa_azimuth, m.aoa_elevation) = angles_of(-d);
        const double lambda = kSpeedOfLight / sc.cfg.carrier_hz;
        const double amp = l.gain_db ? std::pow(10.0, *l.gain_db / 20.0) : lambda / (4.0 * kPi * dist);
        m.gamma = Eigen::Matrix2cd::Identity() * amp;
        m.tx_chain = l.tx_chain;
        m.rx_chain = l.rx_chain;
        out.push_back(m);
    }
    return out;
}

SubspaceBounds parse_subspace(const std::string& spec)
{
    SubspaceBounds b;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || colon == std::string::npos)
            throw SchemaError("subspace: expected name=lo:hi, got '" + item + "'");
        const std::string name = item.substr(0, eq);
        double lo = 0.0;
        double hi = 0.0;
        try {
            lo = std::stod(item.substr(eq + 1, colon - eq - 1));
            hi = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw SchemaError("subspace: bad number in '" + item + "'");
        }
        const std::vector<double> v{lo, hi};
        if (name == "delay_ns")
            b.delay_s = Interval{lo * 1e-9, hi * 1e-9};
        else if (name == "doppler_hz")
            b.doppler_hz = Interval{lo, hi};
        else if (name == "aod_azimuth_deg")
            b.aod_azimuth = degrees(v, name, true);
        else if (name == "aod_elevation_deg")
            b.aod_elevation = degrees(v, name, true);
        else if (name == "aoa_azimuth_deg")
            b.aoa_azimuth = degrees(v, name, true);
        else if (name == "aoa_elevation_deg")
            b.aoa_elevation = degrees(v, name, true);
        else if (name == "power_db")
            b.power_db = Interval{lo, hi};
        else
            throw SchemaError("subspace: unknown parameter '" + name + "'");
    }
    return b;
}

} // namespace sounder
