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

#include "sounder/io.hpp"
#include "sounder/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sounder {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace fs = std::filesystem;

namespace {

fs::path with_ext(const fs::path& stem, const char* ext)
{
    fs::path p = stem;
    p += ext;
    return p;
}

std::vector<char> read_bytes(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + file.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& file, const void* data, std::size_t size)
{
    if (file.has_parent_path())
        fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + file.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out)
        throw IoError("short write to " + file.string());
}

std::string bytes_hash(const void* data, std::size_t size)
{
    return hex64(fnv1a64({static_cast<const std::uint8_t*>(data), size}));
}

Json read_json(const fs::path& file)
{
    try {
        return Json::parse(read_text(file));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(file.string() + ": " + e.what());
    }
}

template <typename T>
T field(const Json& j, const char* key, const fs::path& file)
{
    if (!j.contains(key))
        throw SchemaError(file.string() + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(file.string() + ": bad '" + key + "': " + e.what());
    }
}

} // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& text)
{
    return fnv1a64({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

Json to_json(const SounderConfig& cfg)
{
    return Json{{"carrier_hz", cfg.carrier_hz},
                {"sample_rate_hz", cfg.sample_rate_hz},
                {"waveform_length", cfg.waveform_length},
                {"tones", cfg.tones},
                {"averages", cfg.averages},
                {"shift", cfg.shift},
                {"discard", cfg.discard},
                {"skip", cfg.skip},
                {"n_tx", cfg.n_tx},
                {"n_rx", cfg.n_rx},
                {"switch_time_s", cfg.switch_time_s},
                {"adc_bits", cfg.adc_bits},
                {"tx_power_dbm", cfg.tx_power_dbm},
                {"noise_figure_db", cfg.noise_figure_db},
                {"chains_per_host", cfg.chains_per_host},
                {"zc_root", cfg.zc_root}};
}

Json to_json(const ChannelPlan& plan)
{
    Json slots = Json::array();
    for (const auto& s : plan.slots) {
        Json rx = Json::array();
        for (const auto& r : s.rx)
            rx.push_back({r.chain, r.antenna});
        slots.push_back({{"index", s.index}, {"tx", {s.tx.chain, s.tx.antenna}}, {"rx", rx}});
    }
    return Json{{"n_tx", plan.n_tx},
                {"n_rx", plan.n_rx},
                {"slot_samples", plan.slot_samples},
                {"slot_duration_s", plan.slot_duration_s},
                {"time_slots", plan.size()},
                {"slots", slots}};
}

Json to_json(const DerivedMetrics& m)
{
    return Json{{"bandwidth_hz", m.bandwidth_hz},
                {"snapshot_rate_hz", m.snapshot_rate_hz},
                {"repetition_interval_s", m.repetition_interval_s},
                {"coherence_time_s", m.coherence_time_s},
                {"channels_total", m.channels_total},
                {"channels_unique", m.channels_unique},
                {"time_slots", m.time_slots},
                {"max_delay_spread_s", m.max_delay_spread_s},
                {"doppler_limit_snapshot_hz", m.doppler.per_snapshot},
                {"doppler_limit_burst_hz", m.doppler.per_burst},
                {"doppler_limit_averager_hz", m.doppler.averager_limit},
                {"processing_gain_db", m.processing_gain_db},
                {"data_rate_bytes_per_s", m.data_rate_bytes_per_s}};
}

Json to_json(const ToneSpec<double>& tones)
{
    Json x = Json::array();
    for (int i = 0; i < tones.tone_count(); ++i) {
        const cd v = tones.x(tones.occupied[static_cast<std::size_t>(i)]);
        x.push_back({v.real(), v.imag()});
    }
    return Json{{"length", tones.length()},
                {"tones", tones.tone_count()},
                {"zc_root", tones.zc_root},
                {"zc_length", tones.zc_length},
                {"occupied_bins", tones.occupied},
                {"offsets", tones.offsets},
                {"x", x}};
}

std::string config_hash(const SounderConfig& cfg) { return hex64(fnv1a64(to_json(cfg).dump())); }

std::string plan_hash(const ChannelPlan& plan) { return hex64(fnv1a64(to_json(plan).dump())); }

void write_tensor(const fs::path& stem, const ChannelTensor& t, const Json& extra)
{
    const auto n = static_cast<std::size_t>(t.values.size());
    std::vector<float> buf(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[2 * i] = static_cast<float>(t.values.data()[i].real());
        buf[2 * i + 1] = static_cast<float>(t.values.data()[i].imag());
    }
    write_bytes(with_ext(stem, ".cf32"), buf.data(), buf.size() * sizeof(float));
    Json shape = Json::array();
    for (int d = 0; d < 6; ++d)
        shape.push_back(t.values.dimension(d));
    Json meta{{"format", "cf32le"},
              {"kind", to_string(t.kind)},
              {"axes", {"s", "p_T", "p_R", "m_T", "m_R", t.kind == TensorKind::raw ? "i" : "k"}},
              {"shape", shape},
              {"n_tx", t.n_tx},
              {"n_rx", t.n_rx},
              {"axis", std::vector<double>(t.axis.data(), t.axis.data() + t.axis.size())},
              {"fnv1a64", bytes_hash(buf.data(), buf.size() * sizeof(float))}};
    if (extra.is_object())
        for (const auto& [k, v] : extra.items())
            meta[k] = v;
    write_text(with_ext(stem, ".json"), meta.dump(2) + "\n");
}

ChannelTensor read_tensor(const fs::path& stem)
{
    const fs::path side = with_ext(stem, ".json");
    const Json meta = read_json(side);
    if (field<std::string>(meta, "format", side) != "cf32le")
        throw SchemaError(side.string() + ": unsupported tensor format");
    const auto shape = field<std::vector<Eigen::Index>>(meta, "shape", side);
    if (shape.size() != 6)
        throw SchemaError(side.string() + ": tensor shape must have six axes");
    ChannelTensor t;
    t.kind = tensor_kind_from_string(field<std::string>(meta, "kind", side));
    t.n_tx = field<std::vector<int>>(meta, "n_tx", side);
    t.n_rx = field<std::vector<int>>(meta, "n_rx", side);
    const auto axis = field<std::vector<double>>(meta, "axis", side);
    t.axis = Eigen::Map<const VecX<double>>(axis.data(), static_cast<Eigen::Index>(axis.size()));
    t.values.resize(shape[0], shape[1], shape[2], shape[3], shape[4], shape[5]);
    const auto bytes = read_bytes(with_ext(stem, ".cf32"));
    const auto n = static_cast<std::size_t>(t.values.size());
    if (bytes.size() != n * 2 * sizeof(float))
        throw IoError(stem.string() + ".cf32: size does not match the sidecar shape");
    if (meta.contains("fnv1a64") && meta["fnv1a64"].get<std::string>() != bytes_hash(bytes.data(), bytes.size()))
        throw IoError(stem.string() + ".cf32: checksum mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        float re = 0.0F;
        float im = 0.0F;
        std::memcpy(&re, bytes.data() + 8 * i, 4);
        std::memcpy(&im, bytes.data() + 8 * i + 4, 4);
        t.values.data()[i] = cd(re, im);
    }
    if (static_cast<Eigen::Index>(t.n_tx.size()) != shape[1] || t.axis.size() != shape[5])
        throw SchemaError(side.string() + ": chain layout or axis inconsistent with shape");
    return t;
}

void write_stream(const fs::path& stem, std::span<const Iq16> samples, const Json& meta)
{
    write_bytes(with_ext(stem, ".iq16"), samples.data(), samples.size_bytes());
    Json m{{"format", "iq16le"},
           {"samples", samples.size()},
           {"fnv1a64", bytes_hash(samples.data(), samples.size_bytes())}};
    if (meta.is_object())
        for (const auto& [k, v] : meta.items())
            m[k] = v;
    write_text(with_ext(stem, ".json"), m.dump(2) + "\n");
}

std::vector<Iq16> read_stream(const fs::path& stem, Json* meta)
{
    const fs::path side = with_ext(stem, ".json");
    const Json m = read_json(side);
    const auto bytes = read_bytes(with_ext(stem, ".iq16"));
    if (bytes.size() % sizeof(Iq16) != 0)
        throw IoError(stem.string() + ".iq16: truncated sample");
    if (m.contains("fnv1a64") && m["fnv1a64"].get<std::string>() != bytes_hash(bytes.data(), bytes.size()))
        throw IoError(stem.string() + ".iq16: checksum mismatch");
    std::vector<Iq16> out(bytes.size() / sizeof(Iq16));
    std::memcpy(out.data(), bytes.data(), bytes.size());
    if (meta)
        *meta = m;
    return out;
}

void write_cf64(const fs::path& file, const CVec& v)
{
    write_bytes(file, v.data(), static_cast<std::size_t>(v.size()) * sizeof(cd));
}

CVec read_cf64(const fs::path& file)
{
    const auto bytes = read_bytes(file);
    if (bytes.size() % sizeof(cd) != 0)
        throw IoError(file.string() + ": not a whole number of complex doubles");
    CVec v(static_cast<Eigen::Index>(bytes.size() / sizeof(cd)));
    std::memcpy(v.data(), bytes.data(), bytes.size());
    return v;
}

void write_waveform_iq16(const fs::path& file, const TimeWaveform<double>& w)
{
    const std::span<const cd> s(w.s.data(), static_cast<std::size_t>(w.s.size()));
    const auto q = quantize(s, 16, auto_full_scale(s));
    write_bytes(file, q.samples.data(), q.samples.size() * sizeof(Iq16));
}

void write_b2b(const fs::path& stem, const B2bSet& set, const Json& extra)
{
    std::vector<cd> buf;
    Json pairs = Json::array();
    for (int p = 0; p < set.chains(); ++p)
        for (int q = 0; q < set.chains(); ++q)
            if (p != q && set.has(p, q)) {
                pairs.push_back({p, q});
                const CVec& b = set.at(p, q);
                buf.insert(buf.end(), b.data(), b.data() + b.size());
            }
    write_bytes(with_ext(stem, ".cf64"), buf.data(), buf.size() * sizeof(cd));
    Json meta{{"format", "cf64le"},
              {"chains", set.chains()},
              {"tones", set.tones()},
              {"pairs", pairs},
              {"fnv1a64", bytes_hash(buf.data(), buf.size() * sizeof(cd))}};
    if (extra.is_object())
        for (const auto& [k, v] : extra.items())
            meta[k] = v;
    write_text(with_ext(stem, ".json"), meta.dump(2) + "\n");
}

B2bSet read_b2b(const fs::path& stem)
{
    const fs::path side = with_ext(stem, ".json");
    const Json meta = read_json(side);
    const int chains = field<int>(meta, "chains", side);
    const auto tones = field<Eigen::Index>(meta, "tones", side);
    const auto pairs = field<std::vector<std::pair<int, int>>>(meta, "pairs", side);
    const CVec all = read_cf64(with_ext(stem, ".cf64"));
    if (all.size() != static_cast<Eigen::Index>(pairs.size()) * tones)
        throw IoError(stem.string() + ".cf64: size does not match the pair list");
    B2bSet set(chains, tones);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        set.set(pairs[i].first, pairs[i].second, all.segment(static_cast<Eigen::Index>(i) * tones, tones));
    return set;
}

void write_plan_csv(const fs::path& file, const ChannelPlan& plan, const TimestampMap& tmap)
{
    std::ostringstream os;
    os << std::setprecision(12);
    os << "snapshot,slot,time_s,tx_chain,tx_antenna,rx_chain,rx_antenna\n";
    for (int s = 0; s < tmap.snapshots(); ++s)
        for (const auto& slot : plan.slots)
            for (const auto& rx : slot.rx)
                os << s << ',' << slot.index << ',' << tmap.slot_time(s, slot.index) << ',' << slot.tx.chain << ','
                   << slot.tx.antenna << ',' << rx.chain << ',' << rx.antenna << '\n';
    write_text(file, os.str());
}

void write_paths_csv(const fs::path& file, const std::vector<PathEstimate>& paths)
{
    auto db = [](cd v) { return 20.0 * std::log10(std::abs(v)); };
    std::ostringstream os;
    os << std::setprecision(10);
    os << "time_s,tx_chain,rx_chain,delay_ns,doppler_hz,aod_azimuth_deg,aod_elevation_deg,aoa_azimuth_deg,"
          "aoa_elevation_deg,power_db,gamma_hh_db,gamma_hv_db,gamma_vh_db,gamma_vv_db\n";
    for (const auto& p : paths) {
        const Mpc& m = p.mpc;
        os << p.time_s << ',' << m.tx_chain << ',' << m.rx_chain << ',' << m.delay_s * 1e9 << ',' << m.doppler_hz
           << ',' << rad2deg(m.aod_azimuth) << ',' << rad2deg(m.aod_elevation) << ',' << rad2deg(m.aoa_azimuth)
           << ',' << rad2deg(m.aoa_elevation) << ',' << p.power_db << ',' << db(m.gamma(0, 0)) << ','
           << db(m.gamma(0, 1)) << ',' << db(m.gamma(1, 0)) << ',' << db(m.gamma(1, 1)) << '\n';
    }
    write_text(file, os.str());
}

std::vector<TracePoint> read_attenuator_trace(const fs::path& file)
{
    std::istringstream in(read_text(file));
    std::vector<TracePoint> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double f = 0.0;
        double re = 0.0;
        double im = 0.0;
        if (!(ls >> f))
            continue;
        if (!(ls >> re >> im))
            throw SchemaError(file.string() + ":" + std::to_string(lineno) + ": expected 'frequency re im'");
        out.push_back({f, cd(re, im)});
    }
    if (out.empty())
        throw SchemaError(file.string() + ": empty attenuator trace");
    std::sort(out.begin(), out.end(),
              [](const TracePoint& a, const TracePoint& b) { return a.frequency_hz < b.frequency_hz; });
    return out;
}

CVec resample_trace(const std::vector<TracePoint>& trace, const VecX<double>& frequencies)
{
    if (trace.empty())
        throw InvalidInput("empty attenuator trace");
    CVec out(frequencies.size());
    for (Eigen::Index i = 0; i < frequencies.size(); ++i) {
        const double f = frequencies(i);
        const auto it = std::lower_bound(trace.begin(), trace.end(), f,
                                         [](const TracePoint& p, double v) { return p.frequency_hz < v; });
        if (it == trace.begin())
            out(i) = trace.front().s21;
        else if (it == trace.end())
            out(i) = trace.back().s21;
        else {
            const auto& a = *(it - 1);
            const auto& b = *it;
            const double w = (f - a.frequency_hz) / (b.frequency_hz - a.frequency_hz);
            out(i) = a.s21 + w * (b.s21 - a.s21);
        }
    }
    return out;
}

std::string read_text(const fs::path& file)
{
    const auto b = read_bytes(file);
    return {b.begin(), b.end()};
}

void write_text(const fs::path& file, const std::string& text) { write_bytes(file, text.data(), text.size()); }

} // namespace sounder
