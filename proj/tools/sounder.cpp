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

// Command-line front end: metrics | simulate | estimate | calibrate.

#include "sounder/calib.hpp"
#include "sounder/channel.hpp"
#include "sounder/config.hpp"
#include "sounder/dsp.hpp"
#include "sounder/errors.hpp"
#include "sounder/estimate.hpp"
#include "sounder/io.hpp"
#include "sounder/sage.hpp"
#include "sounder/scenario.hpp"
#include "sounder/schedule.hpp"
#include "sounder/waveform.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sounder;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInput = 2;

struct Options
{
    fs::path scenario;
    fs::path out;
    fs::path tensor;
    std::optional<std::uint64_t> seed;
    bool raw_stream = false;
    std::string subspace;
};

std::string format_si(double v, const char* unit)
{
    static const std::pair<double, const char*> prefixes[] = {{1e9, "G"}, {1e6, "M"}, {1e3, "k"}, {1.0, ""},
                                                              {1e-3, "m"}, {1e-6, "u"}, {1e-9, "n"}};
    std::ostringstream os;
    for (const auto& [scale, p] : prefixes)
        if (std::abs(v) >= scale || scale == 1e-9) {
            os << std::setprecision(4) << v / scale << ' ' << p << unit;
            return os.str();
        }
    return os.str();
}

void print_table(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& rows)
{
    std::size_t width = 0;
    for (const auto& r : rows)
        width = std::max(width, r.first.size());
    for (const auto& [k, v] : rows)
        os << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
}

int cmd_metrics(const Options& opt)
{
    const Scenario sc = load_scenario(opt.scenario);
    const auto report = validate_config(sc.cfg, sc.bounds);
    const auto m = derive_metrics(sc.cfg);
    const auto sw = switch_timeline(build_schedule(sc.cfg), sc.cfg);

    Json issues = Json::array();
    for (const auto& i : report.issues)
        issues.push_back({{"severity", i.severity == Severity::violation ? "violation" : "warning"},
                          {"code", i.code},
                          {"message", i.message}});
    for (const auto& w : sw.warnings)
        issues.push_back({{"severity", "warning"}, {"code", "switch_rate"}, {"message", w}});
    Json doc{{"scenario", sc.name}, {"config", to_json(sc.cfg)}, {"metrics", to_json(m)}, {"issues", issues}};

    std::vector<std::pair<std::string, std::string>> rows{
        {"Bandwidth", format_si(m.bandwidth_hz, "Hz")},
        {"Snapshot rate", format_si(m.snapshot_rate_hz, "Hz")},
        {"Repetition interval", format_si(m.repetition_interval_s, "s")},
        {"Coherence time", format_si(m.coherence_time_s, "s")},
        {"Antenna combinations", std::to_string(m.channels_unique)},
        {"Measured channels", std::to_string(m.channels_total)},
        {"Time slots", std::to_string(m.time_slots)},
        {"Max. delay spread", format_si(m.max_delay_spread_s, "s")},
        {"Doppler limit (snapshot)", format_si(m.doppler.per_snapshot, "Hz")},
        {"Doppler limit (burst)", format_si(m.doppler.per_burst, "Hz")},
        {"Doppler limit (averager)", format_si(m.doppler.averager_limit, "Hz")},
        {"Processing gain", format_si(m.processing_gain_db, "dB")},
        {"Data rate", format_si(m.data_rate_bytes_per_s, "B/s")},
        {"Skipped samples R", std::to_string(sc.cfg.skip)},
    };
    print_table(std::cout, rows);
    for (const auto& i : report.issues)
        std::cout << (i.severity == Severity::violation ? "violation: " : "warning: ") << i.message << '\n';
    for (const auto& w : sw.warnings)
        std::cout << "warning: " << w << '\n';

    if (!opt.out.empty())
        write_text(opt.out / "metrics.json", doc.dump(2) + "\n");
    return report.ok() ? 0 : kExitRuntime;
}

int cmd_simulate(const Options& opt)
{
    Scenario sc = load_scenario(opt.scenario);
    if (opt.seed)
        sc.seed = *opt.seed;
    if (opt.out.empty())
        throw SchemaError("simulate needs --out");
    fs::create_directories(opt.out);

    const auto& cfg = sc.cfg;
    const auto plan = build_schedule(cfg);
    const auto tones = build_tones<double>(static_cast<int>(cfg.waveform_length), static_cast<int>(cfg.tones),
                                           cfg.zc_root);
    const TimestampMap tmap(plan, cfg, sc.snapshots);
    const auto arrays = build_arrays(sc);
    const auto paths = scene_paths(sc, arrays);
    const B2bSet b = B2bSet::identity(static_cast<int>(cfg.chain_count()), tones.tone_count());

    const ChannelTensor hw = synth_transfer(paths, arrays, b, tmap, cfg, tones, sc.noise_power, sc.seed);
    const ChannelTensor h = remove_hardware(hw, b);
    const Json tag{{"scenario", sc.name}, {"seed", sc.seed}, {"config_hash", config_hash(cfg)},
                   {"plan_hash", plan_hash(plan)}};
    write_tensor(opt.out / "h", h, tag);
    write_plan_csv(opt.out / "plan.csv", plan, tmap);
    write_text(opt.out / "tones.json", to_json(tones).dump(2) + "\n");
    write_waveform_iq16(opt.out / "waveform.iq16", synthesize(tones, cfg.sample_rate_hz));
    Json summary{{"scenario", sc.name},
                 {"seed", sc.seed},
                 {"snapshots", sc.snapshots},
                 {"paths", paths.size()},
                 {"shape", {h.values.dimension(0), h.values.dimension(1), h.values.dimension(2),
                            h.values.dimension(3), h.values.dimension(4), h.values.dimension(5)}}};

    if (opt.raw_stream) {
        std::vector<int> chains = sc.stream_chains;
        if (chains.empty())
            for (int p = 0; p < static_cast<int>(cfg.chain_count()); ++p)
                if (cfg.n_rx[static_cast<std::size_t>(p)] > 0)
                    chains.push_back(p);
        // per-sample noise giving the same per-entry noise after averaging and the DFT
        const double sample_noise =
            sc.noise_power * static_cast<double>(cfg.averages) / static_cast<double>(cfg.waveform_length);
        ChannelTensor d = make_tensor(TensorKind::raw, sc.snapshots, cfg.n_tx, cfg.n_rx, cfg.waveform_length);
        Json streams = Json::array();
        std::size_t saturations = 0;
        for (int pr : chains) {
            const CVec w = synth_stream(paths, arrays, b, cfg, plan, tones, sample_noise, pr, sc.snapshots, sc.seed);
            const std::span<const cd> ws(w.data(), static_cast<std::size_t>(w.size()));
            const AdcModel adc{cfg.adc_bits, auto_full_scale(ws)};
            const auto q = quantize(ws, adc.bits, adc.full_scale);
            const std::string stem = "stream_rx" + std::to_string(pr);
            write_stream(opt.out / stem, q.samples,
                         {{"rx_chain", pr},
                          {"snapshots", sc.snapshots},
                          {"sample_rate_hz", cfg.sample_rate_hz},
                          {"adc_bits", adc.bits},
                          {"full_scale", adc.full_scale},
                          {"clipped", q.clipped},
                          {"overflow_policy", "saturate"},
                          {"config_hash", config_hash(cfg)},
                          {"plan_hash", plan_hash(plan)}});
            saturations += capture_raw(d, q.samples, cfg, plan, pr, adc);
            streams.push_back(stem);
        }
        const auto tf = transfer_function(d, tones, cfg);
        const ChannelTensor hs = remove_hardware(tf.h, b);
        write_tensor(opt.out / "h_stream", hs, tag);
        double worst = 0.0;
        for (int pr : chains)
            for (int pt = 0; pt < static_cast<int>(cfg.chain_count()); ++pt)
                for (int s = 0; s < sc.snapshots; ++s)
                    for (int mt = 0; mt < cfg.n_tx[static_cast<std::size_t>(pt)]; ++mt)
                        for (int mr = 0; mr < cfg.n_rx[static_cast<std::size_t>(pr)]; ++mr)
                            if (pt != pr)
                                worst = std::max(worst, (hs.row(s, pt, pr, mt, mr) - h.row(s, pt, pr, mt, mr))
                                                            .cwiseAbs()
                                                            .maxCoeff());
        summary["streams"] = streams;
        summary["averager_saturations"] = saturations;
        summary["stream_vs_direct_max_abs_error"] = worst;
    }
    write_text(opt.out / "simulate.json", summary.dump(2) + "\n");
    std::cout << "wrote " << (opt.out / "h.cf32").string() << '\n';
    return 0;
}

int cmd_estimate(const Options& opt)
{
    Scenario sc = load_scenario(opt.scenario);
    if (opt.out.empty())
        throw SchemaError("estimate needs --out");
    const fs::path stem = opt.tensor.empty() ? opt.out / "h" : opt.tensor;
    const ChannelTensor h = read_tensor(stem);
    if (h.n_tx != sc.cfg.n_tx || h.n_rx != sc.cfg.n_rx)
        throw SchemaError("tensor chain layout does not match the scenario");
    const auto plan = build_schedule(sc.cfg);
    const TimestampMap tmap(plan, sc.cfg, static_cast<int>(h.snapshots()));
    const auto arrays = build_arrays(sc);
    const auto result = sage_estimate(h, arrays, tmap, sc.sage);
    SubspaceBounds bounds = sc.subspace;
    if (!opt.subspace.empty())
        bounds = parse_subspace(opt.subspace);
    const auto kept = subspace_filter(result.paths, bounds);

    fs::create_directories(opt.out);
    write_paths_csv(opt.out / "paths.csv", kept);
    Json report{{"paths", result.paths.size()},
                {"kept", kept.size()},
                {"noise_variance", result.noise_variance},
                {"residual_history", result.residual_history}};
    write_text(opt.out / "residual.json", report.dump(2) + "\n");
    std::cout << kept.size() << " path(s) written to " << (opt.out / "paths.csv").string() << '\n';
    return 0;
}

// Factorizable chains: tx(p, k) rx(q, k) with a gain ripple and a group delay per chain.
CVec synthetic_chain(int p, bool transmit, const VecX<double>& f, const SyntheticChains& s)
{
    const double sign = transmit ? 1.0 : -1.0;
    const double gain_db = s.ripple_db * std::sin(1.3 * p + (transmit ? 0.0 : 0.7));
    const double delay = s.group_delay_s * (1.0 + 0.1 * p + (transmit ? 0.0 : 0.05));
    CVec out(f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k)
        out(k) = std::polar(std::pow(10.0, gain_db / 20.0),
                            -kTwoPi * (f(k) - f(0)) * delay + sign * 0.3 * p);
    return out;
}

int cmd_calibrate(const Options& opt)
{
    const Scenario sc = load_scenario(opt.scenario);
    if (opt.out.empty())
        throw SchemaError("calibrate needs --out");
    fs::create_directories(opt.out);
    const auto& cfg = sc.cfg;
    const auto tones = build_tones<double>(static_cast<int>(cfg.waveform_length), static_cast<int>(cfg.tones),
                                           cfg.zc_root);
    const VecX<double> f = tones.tone_frequencies(cfg.carrier_hz, cfg.sample_rate_hz);
    const int chains = static_cast<int>(cfg.chain_count());
    const auto& opts = sc.calibrate;

    const CVec s21 = opts.attenuator_file ? resample_trace(read_attenuator_trace(*opts.attenuator_file), f)
                                          : CVec::Constant(f.size(), std::pow(10.0, -opts.attenuation_db / 20.0));

    std::vector<B2bCapture> captures = opts.captures;
    if (opts.synthetic) {
        const CVec x = tones.occupied_values();
        for (const auto& [p, q] : required_connections(chains))
            for (const auto& [a, c] : {std::pair{p, q}, std::pair{q, p}}) {
                const CVec hw = synthetic_chain(a, true, f, *opts.synthetic)
                                    .cwiseProduct(synthetic_chain(c, false, f, *opts.synthetic));
                CVec y = CVec::Zero(tones.length());
                const CVec occ = x.cwiseProduct(hw).cwiseProduct(s21);
                for (int i = 0; i < tones.tone_count(); ++i)
                    y(tones.occupied[static_cast<std::size_t>(i)]) = occ(i);
                const fs::path file =
                    opt.out / "captures" / ("b2b_" + std::to_string(a) + "_" + std::to_string(c) + ".cf64");
                fs::create_directories(file.parent_path());
                write_cf64(file, y);
                captures.push_back({a, c, file});
            }
    }

    B2bSet partial(chains, tones.tone_count());
    partial.attenuator = s21;
    for (const auto& cap : captures)
        partial.set(cap.tx_chain, cap.rx_chain, b2b_response(read_cf64(cap.file), tones, s21));
    const auto done = complete_combinations(partial);
    write_b2b(opt.out / "b2b", done.set,
              {{"measured", partial.measured_count()},
               {"required_connections", required_connections(chains).size()},
               {"redundant_pairs", done.redundant},
               {"completion_residual", done.residual}});
    std::cout << "completed " << done.set.measured_count() << " pairs from " << partial.measured_count()
              << " measured, residual " << done.residual << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distributed MIMO channel sounder twin"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* c, bool needs_out) {
        c->add_option("--scenario", opt.scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
        auto* o = c->add_option("--out", opt.out, "Output directory");
        if (needs_out)
            o->required();
    };
    auto* metrics = app.add_subcommand("metrics", "Validate a configuration and derive its metrics");
    add_common(metrics, false);
    auto* simulate = app.add_subcommand("simulate", "Synthesize channel tensors and raw streams");
    add_common(simulate, true);
    auto* seed_opt = simulate->add_option("--seed", seed, "Override the scenario seed");
    simulate->add_flag("--raw-stream", opt.raw_stream, "Also write and process the ADC sample streams");
    auto* estimate = app.add_subcommand("estimate", "Estimate multipath parameters with SAGE");
    add_common(estimate, true);
    estimate->add_option("--tensor", opt.tensor, "Tensor stem (default: <out>/h)");
    estimate->add_option("--subspace", opt.subspace, "Parameter bounds, e.g. delay_ns=29:32,aoa_azimuth_deg=65:110");
    auto* calibrate = app.add_subcommand("calibrate", "Complete back-to-back chain responses");
    add_common(calibrate, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    if (seed_opt->count() > 0)
        opt.seed = seed;

    try {
        if (metrics->parsed())
            return cmd_metrics(opt);
        if (simulate->parsed())
            return cmd_simulate(opt);
        if (estimate->parsed())
            return cmd_estimate(opt);
        return cmd_calibrate(opt);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
