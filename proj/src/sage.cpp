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

#include "sounder/sage.hpp"
#include "sounder/errors.hpp"
#include "sounder/fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace sounder {

namespace {

using Manifold = Eigen::Matrix<cd, Eigen::Dynamic, 2>;

enum Dim { kDelay, kDoppler, kAoaAz, kAoaEl, kAodAz, kAodEl, kDims };

struct Params
{
    std::array<double, kDims> v{};
};

struct Fit
{
    Eigen::Matrix2cd gamma = Eigen::Matrix2cd::Zero();
    double j = 0.0; // energy explained by the path
};

struct Path
{
    Params p;
    Fit fit;
    CMat model;
    int iterations = 0;
};

Eigen::Matrix2cd pinv_hermitian(const Eigen::Matrix2cd& g)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(g);
    const auto& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    if (!(top > 0.0))
        return out;
    for (int i = 0; i < 2; ++i)
        if (ev(i) > 1e-10 * top)
            out += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() / ev(i);
    return out;
}

struct AngleGrid
{
    std::vector<std::pair<double, double>> angles; // (azimuth, elevation)
    std::vector<Manifold> a;
};

// Observations of one chain pair, rows ordered (s, m_T, m_R).
class Link
{
public:
    Link(const ChannelTensor& h, const PanelGeometry& tx, const PanelGeometry& rx, const TimestampMap& tmap, int pt,
         int pr, int first, int count)
        : tx_(tx), rx_(rx), pt_(pt), pr_(pr), s_(count)
    {
        nt_ = h.n_tx[static_cast<std::size_t>(pt)];
        nr_ = h.n_rx[static_cast<std::size_t>(pr)];
        const Eigen::Index rows = static_cast<Eigen::Index>(count) * nt_ * nr_;
        f_ = h.axis;
        x_.resize(rows, h.bins());
        t_.resize(rows);
        Eigen::Index r = 0;
        for (int s = first; s < first + count; ++s)
            for (int mt = 0; mt < nt_; ++mt)
                for (int mr = 0; mr < nr_; ++mr, ++r) {
                    x_.row(r) = h.row(s, pt, pr, mt, mr).transpose();
                    t_(r) = tmap.at(s, pt, pr, mt, mr);
                    mt_.push_back(mt);
                    mr_.push_back(mr);
                }
        if (!x_.allFinite())
            throw InvalidInput("transfer function holds non-finite values");
    }

    const CMat& data() const { return x_; }
    int tx_count() const { return nt_; }
    int rx_count() const { return nr_; }
    int snapshots() const { return s_; }
    Eigen::Index tones() const { return x_.cols(); }
    int tx_chain() const { return pt_; }
    int rx_chain() const { return pr_; }
    const VecX<double>& frequencies() const { return f_; }
    const PanelGeometry& tx_array() const { return tx_; }
    const PanelGeometry& rx_array() const { return rx_; }

    CVec delay_phasor(double tau) const
    {
        return (f_.array() * (-kTwoPi * tau)).unaryExpr([](double ph) { return std::polar(1.0, ph); });
    }

    CVec doppler_phasor(double nu) const
    {
        return (t_.array() * (kTwoPi * nu)).unaryExpr([](double ph) { return std::polar(1.0, ph); });
    }

    // W(m_R, m_T) = sum_s sum_k conj(d_k) conj(e_r) X_r(k)
    CMat correlate(const CMat& x, double tau, double nu) const
    {
        const CVec w = (x * delay_phasor(tau).conjugate()).cwiseProduct(doppler_phasor(nu).conjugate());
        CMat out = CMat::Zero(nr_, nt_);
        for (Eigen::Index r = 0; r < w.size(); ++r)
            out(mr_[static_cast<std::size_t>(r)], mt_[static_cast<std::size_t>(r)]) += w(r);
        return out;
    }

    Manifold rx_manifold(double az, double el) const { return rx_.manifold(az, el, nr_); }
    Manifold tx_manifold(double az, double el) const { return tx_.manifold(az, el, nt_); }

    Fit fit(const CMat& w, const Manifold& ar, const Manifold& at) const
    {
        const Eigen::Matrix2cd z = ar.adjoint() * w * at.conjugate();
        const Eigen::Matrix2cd gr = ar.adjoint() * ar;
        const Eigen::Matrix2cd gt = at.adjoint() * at;
        const double scale = static_cast<double>(tones()) * static_cast<double>(s_);
        Fit f;
        f.gamma = pinv_hermitian(gr) * z * pinv_hermitian(gt).transpose() / scale;
        f.j = (f.gamma.conjugate().cwiseProduct(z)).sum().real();
        return f;
    }

    Fit fit(const CMat& x, const Params& p) const
    {
        return fit(correlate(x, p.v[kDelay], p.v[kDoppler]), rx_manifold(p.v[kAoaAz], p.v[kAoaEl]),
                   tx_manifold(p.v[kAodAz], p.v[kAodEl]));
    }

    CMat model(const Params& p, const Eigen::Matrix2cd& gamma) const
    {
        const CMat c = rx_manifold(p.v[kAoaAz], p.v[kAoaEl]) * gamma *
                       tx_manifold(p.v[kAodAz], p.v[kAodEl]).transpose();
        const CVec d = delay_phasor(p.v[kDelay]);
        const CVec e = doppler_phasor(p.v[kDoppler]);
        CMat m(x_.rows(), x_.cols());
        for (Eigen::Index r = 0; r < x_.rows(); ++r)
            m.row(r) = (c(mr_[static_cast<std::size_t>(r)], mt_[static_cast<std::size_t>(r)]) * e(r)) *
                       d.transpose();
        return m;
    }

    double repetition_s = 0.0;

private:
    const PanelGeometry& tx_;
    const PanelGeometry& rx_;
    int pt_;
    int pr_;
    int s_;
    int nt_ = 0;
    int nr_ = 0;
    CMat x_;
    VecX<double> t_;
    VecX<double> f_;
    std::vector<int> mt_;
    std::vector<int> mr_;
};

AngleGrid make_grid(const PanelGeometry& array, int count, double step_deg, double span_deg)
{
    AngleGrid g;
    const double step = deg2rad(step_deg);
    std::vector<double> az;
    if (span_deg >= 360.0) {
        for (double a = -kPi; a < kPi - 1e-12; a += step)
            az.push_back(a);
    } else {
        const double c = array.boresight_azimuth();
        const double half = deg2rad(span_deg) / 2.0;
        const int n = static_cast<int>(std::floor(half / step + 1e-9));
        for (int i = -n; i <= n; ++i)
            az.push_back(wrap_pi(c + i * step));
    }
    const int n_el = static_cast<int>(std::floor(kPi / step + 1e-9));
    for (int j = 0; j <= n_el; ++j) {
        const double el = std::min(kPi, j * step);
        for (double a : az) {
            g.angles.emplace_back(a, el);
            g.a.push_back(array.manifold(a, el, count));
        }
    }
    return g;
}

class LinkEstimator
{
public:
    LinkEstimator(const Link& link, const SageSettings& s) : link_(link), set_(s)
    {
        const auto& f = link.frequencies();
        const Eigen::Index K = f.size();
        spacing_ = K > 1 ? (f(K - 1) - f(0)) / static_cast<double>(K - 1) : 0.0;
        active_[kDelay] = K > 1;
        active_[kDoppler] = link.snapshots() > 1 && link.repetition_s > 0.0;
        active_[kAoaAz] = active_[kAoaEl] = link.rx_count() > 1;
        active_[kAodAz] = active_[kAodEl] = link.tx_count() > 1;

        const double bandwidth = spacing_ * static_cast<double>(K);
        step_[kDelay] = s.delay_step_s > 0.0 ? s.delay_step_s : (bandwidth > 0.0 ? 1.0 / (2.0 * bandwidth) : 0.0);
        step_[kDoppler] = s.doppler_step_hz > 0.0
                              ? s.doppler_step_hz
                              : (active_[kDoppler] ? 1.0 / (2.0 * link.snapshots() * link.repetition_s) : 0.0);
        for (int d : {kAoaAz, kAoaEl, kAodAz, kAodEl})
            step_[static_cast<std::size_t>(d)] = deg2rad(s.angle_step_deg);
        period_ = spacing_ > 0.0 ? 1.0 / spacing_ : 0.0;

        if (active_[kAoaAz])
            rx_grid_ = make_grid(link.rx_array(), link.rx_count(), s.angle_step_deg, s.azimuth_span_deg);
        if (active_[kAodAz])
            tx_grid_ = make_grid(link.tx_array(), link.tx_count(), s.angle_step_deg, s.azimuth_span_deg);
    }

    // Noise variance per entry from the median of the noncoherent delay
    // spectrum, where paths occupy only a few bins.
    double noise_variance(const CMat& x) const
    {
        const auto p = delay_spectrum(x);
        std::vector<double> v(p.data(), p.data() + p.size());
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
        return v[v.size() / 2] / static_cast<double>(x.rows() * x.cols());
    }

    Path initialize(const CMat& x) const
    {
        Params p;
        p.v[kAoaAz] = link_.rx_array().boresight_azimuth();
        p.v[kAoaEl] = kPi / 2;
        p.v[kAodAz] = link_.tx_array().boresight_azimuth();
        p.v[kAodEl] = kPi / 2;

        if (active_[kDelay]) {
            const auto spec = delay_spectrum(x);
            Eigen::Index best = 0;
            spec.maxCoeff(&best);
            p.v[kDelay] = static_cast<double>(best) * period_ / static_cast<double>(spec.size());
        }
        if (active_[kDoppler]) {
            const double f_rep = 1.0 / link_.repetition_s;
            const double step = step_[kDoppler];
            const int n = std::max(1, static_cast<int>(std::floor(f_rep / step + 1e-9)));
            double best = -1.0;
            for (int i = 0; i < n; ++i) {
                const double nu = -f_rep / 2 + i * step;
                const double e = link_.correlate(x, p.v[kDelay], nu).squaredNorm();
                if (e > best) {
                    best = e;
                    p.v[kDoppler] = nu;
                }
            }
        }
        const CMat w = link_.correlate(x, p.v[kDelay], p.v[kDoppler]);
        if (active_[kAoaAz]) {
            double best = -1.0;
            for (std::size_t g = 0; g < rx_grid_.a.size(); ++g) {
                const Manifold& a = rx_grid_.a[g];
                const CMat v = a.adjoint() * w;
                const double e = (v.adjoint() * pinv_hermitian(a.adjoint() * a) * v).trace().real();
                if (e > best) {
                    best = e;
                    std::tie(p.v[kAoaAz], p.v[kAoaEl]) = rx_grid_.angles[g];
                }
            }
        }
        if (active_[kAodAz]) {
            const Manifold ar = link_.rx_manifold(p.v[kAoaAz], p.v[kAoaEl]);
            double best = -1.0;
            for (std::size_t g = 0; g < tx_grid_.a.size(); ++g) {
                const double e = link_.fit(w, ar, tx_grid_.a[g]).j;
                if (e > best) {
                    best = e;
                    std::tie(p.v[kAodAz], p.v[kAodEl]) = tx_grid_.angles[g];
                }
            }
        }
        Path path;
        path.p = p;
        path.fit = link_.fit(x, p);
        refine(x, path);
        refine(x, path);
        return path;
    }

    // One coordinate-wise pass over the active dimensions. Every local
    // grid contains the current value, so the explained energy never drops.
    void refine(const CMat& x, Path& path) const
    {
        for (int d = 0; d < kDims; ++d) {
            if (!active_[static_cast<std::size_t>(d)])
                continue;
            double step = step_[static_cast<std::size_t>(d)];
            for (int level = 0; level <= set_.refine_levels; ++level) {
                refine_dim(x, path, d, step);
                step /= static_cast<double>(set_.refine_factor);
            }
        }
        path.model = link_.model(path.p, path.fit.gamma);
        ++path.iterations;
    }

private:
    VecX<double> delay_spectrum(const CMat& x) const
    {
        const Eigen::Index K = x.cols();
        Eigen::Index n = 1;
        while (n < 2 * K)
            n <<= 1;
        VecX<double> p = VecX<double>::Zero(n);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            CVec padded = CVec::Zero(n);
            padded.head(K) = x.row(r).transpose();
            p += (idft<double>(padded) * static_cast<double>(n)).cwiseAbs2();
        }
        return p;
    }

    double normalize(int d, double v) const
    {
        if (d == kDelay && period_ > 0.0) {
            v = std::fmod(v, period_);
            return v < 0.0 ? v + period_ : v;
        }
        if (d == kAoaAz || d == kAodAz)
            return wrap_pi(v);
        return v;
    }

    void refine_dim(const CMat& x, Path& path, int d, double step) const
    {
        const bool elevation = d == kAoaEl || d == kAodEl;
        const double centre = path.p.v[static_cast<std::size_t>(d)];
        // angle dimensions reuse the correlation at the current delay and Doppler
        const bool angular = d >= kAoaAz;
        const CMat w = angular ? link_.correlate(x, path.p.v[kDelay], path.p.v[kDoppler]) : CMat();

        Fit best = angular ? link_.fit(w, link_.rx_manifold(path.p.v[kAoaAz], path.p.v[kAoaEl]),
                                       link_.tx_manifold(path.p.v[kAodAz], path.p.v[kAodEl]))
                           : link_.fit(x, path.p);
        double best_v = centre;
        const int h = set_.refine_factor;
        for (int i = -h; i <= h; ++i) {
            if (i == 0)
                continue;
            double v = centre + i * step;
            if (elevation && (v < 0.0 || v > kPi))
                continue;
            v = normalize(d, v);
            Params q = path.p;
            q.v[static_cast<std::size_t>(d)] = v;
            const Fit f = angular ? link_.fit(w, link_.rx_manifold(q.v[kAoaAz], q.v[kAoaEl]),
                                              link_.tx_manifold(q.v[kAodAz], q.v[kAodEl]))
                                  : link_.fit(x, q);
            if (f.j > best.j) {
                best = f;
                best_v = v;
            }
        }
        path.p.v[static_cast<std::size_t>(d)] = best_v;
        path.fit = best;
    }

    const Link& link_;
    const SageSettings& set_;
    double spacing_ = 0.0;
    double period_ = 0.0;
    std::array<bool, kDims> active_{};
    std::array<double, kDims> step_{};
    AngleGrid rx_grid_;
    AngleGrid tx_grid_;
};

bool at_pole(double elevation) { return elevation < 1e-12 || elevation > kPi - 1e-12; }

double power_db(const Eigen::Matrix2cd& g) { return 10.0 * std::log10(g.squaredNorm()); }

void check_monotone(double before, double after)
{
    if (after > before * (1.0 + 1e-9) + 1e-300)
        throw std::logic_error("SAGE residual increased during an update");
}

} // namespace

SageResult sage_estimate(const ChannelTensor& h, const std::vector<PanelGeometry>& arrays, const TimestampMap& tmap,
                         const SageSettings& settings)
{
    if (h.kind != TensorKind::calibrated && h.kind != TensorKind::hardware)
        throw InvalidInput("SAGE expects transfer functions on the occupied tones");
    if (arrays.size() != static_cast<std::size_t>(h.chains()))
        throw InvalidInput("one array per RF chain is required");
    if (settings.max_paths < 0 || settings.refine_factor < 1 || settings.angle_step_deg <= 0.0 ||
        settings.dynamic_range_db <= 0.0)
        throw InvalidInput("invalid SAGE settings");
    const int first = settings.first_snapshot;
    const int count = settings.snapshots > 0 ? settings.snapshots : static_cast<int>(h.snapshots()) - first;
    if (first < 0 || count < 1 || first + count > h.snapshots())
        throw InvalidInput("observation window outside the record");

    SageResult result;
    result.residual = h;
    const int chains = static_cast<int>(h.chains());

    std::vector<std::unique_ptr<Link>> links;
    for (int pt = 0; pt < chains; ++pt)
        for (int pr = 0; pr < chains; ++pr)
            if (pt != pr && h.n_tx[static_cast<std::size_t>(pt)] > 0 && h.n_rx[static_cast<std::size_t>(pr)] > 0) {
                links.push_back(std::make_unique<Link>(h, arrays[static_cast<std::size_t>(pt)],
                                                       arrays[static_cast<std::size_t>(pr)], tmap, pt, pr, first,
                                                       count));
                links.back()->repetition_s = tmap.repetition_interval();
            }

    double others = 0.0;
    for (const auto& l : links)
        others += l->data().squaredNorm();
    double noise_sum = 0.0;
    Eigen::Index noise_entries = 0;

    for (const auto& lp : links) {
        const Link& link = *lp;
        const double energy = link.data().squaredNorm();
        others -= energy;
        LinkEstimator est(link, settings);
        CMat residual = link.data();
        const double sigma2 = est.noise_variance(residual);
        noise_sum += sigma2 * static_cast<double>(residual.size());
        noise_entries += residual.size();
        double current = residual.squaredNorm();
        result.residual_history.push_back(others + current);

        std::vector<Path> paths;
        while (static_cast<int>(paths.size()) < settings.max_paths) {
            Path cand = est.initialize(residual);
            if (!(cand.fit.j > 0.0) || cand.fit.j < settings.detection_factor * sigma2)
                break;
            if (!paths.empty()) {
                double strongest = -std::numeric_limits<double>::infinity();
                for (const auto& p : paths)
                    strongest = std::max(strongest, power_db(p.fit.gamma));
                if (power_db(cand.fit.gamma) < strongest - settings.dynamic_range_db)
                    break;
            }
            residual -= cand.model;
            const double after = residual.squaredNorm();
            check_monotone(current, after);
            current = after;
            result.residual_history.push_back(others + current);
            paths.push_back(std::move(cand));

            for (int it = 0; it < settings.max_iterations; ++it) {
                const double start = current;
                for (auto& p : paths) {
                    const CMat xl = residual + p.model;
                    est.refine(xl, p);
                    residual = xl - p.model;
                    const double now = residual.squaredNorm();
                    check_monotone(current, now);
                    current = now;
                    result.residual_history.push_back(others + current);
                }
                if (start - current <= settings.convergence * start)
                    break;
            }
        }

        // Residual back into tensor form.
        Eigen::Index r = 0;
        for (int s = first; s < first + count; ++s)
            for (int mt = 0; mt < link.tx_count(); ++mt)
                for (int mr = 0; mr < link.rx_count(); ++mr, ++r)
                    result.residual.set_row(s, link.tx_chain(), link.rx_chain(), mt, mr, residual.row(r).transpose());

        for (const auto& p : paths) {
            PathEstimate e;
            e.mpc.delay_s = p.p.v[kDelay];
            e.mpc.doppler_hz = p.p.v[kDoppler];
            e.mpc.aoa_azimuth = p.p.v[kAoaAz];
            e.mpc.aoa_elevation = p.p.v[kAoaEl];
            e.mpc.aod_azimuth = p.p.v[kAodAz];
            e.mpc.aod_elevation = p.p.v[kAodEl];
            if (at_pole(e.mpc.aoa_elevation))
                e.mpc.aoa_azimuth = 0.0;
            if (at_pole(e.mpc.aod_elevation))
                e.mpc.aod_azimuth = 0.0;
            e.mpc.gamma = p.fit.gamma;
            e.mpc.tx_chain = link.tx_chain();
            e.mpc.rx_chain = link.rx_chain();
            e.power_db = power_db(p.fit.gamma);
            e.contribution_db = 10.0 * std::log10(p.fit.j / energy);
            e.iterations = p.iterations;
            e.time_s = tmap.slot_time(first, 0);
            result.paths.push_back(e);
        }
        others += current;
    }

    result.noise_variance = noise_entries > 0 ? noise_sum / static_cast<double>(noise_entries) : 0.0;
    std::stable_sort(result.paths.begin(), result.paths.end(), [](const PathEstimate& a, const PathEstimate& b) {
        if (a.power_db != b.power_db)
            return a.power_db > b.power_db;
        return a.mpc.delay_s < b.mpc.delay_s;
    });
    return result;
}

} // namespace sounder
