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

#include "sounder/antenna.hpp"
#include "sounder/errors.hpp"
#include "sounder/fft.hpp"

#include <cmath>

namespace sounder {

namespace {

bool uniform(const VecX<double>& v, double first, double step)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i) - (first + static_cast<double>(i) * step)) > 1e-9 * std::max(1.0, std::abs(step)))
            return false;
    return true;
}

// 2-D DFT of an (elevation x azimuth) periodic array, scaled by 1/N.
CMat dft2(const CMat& a)
{
    CMat out(a.rows(), a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        out.row(r) = dft<double>(a.row(r).transpose()).transpose();
    for (Eigen::Index c = 0; c < out.cols(); ++c)
        out.col(c) = dft<double>(out.col(c));
    return out / static_cast<double>(a.size());
}

// Extends theta in [0, pi] to a full period [0, 2 pi): the point
// (phi, 2 pi - theta) on the sphere is (phi + pi, theta).
CMat periodify(const CMat& g, Continuation continuation)
{
    const double sign = continuation == Continuation::odd ? -1.0 : 1.0;
    const Eigen::Index n_el = g.rows();
    const Eigen::Index n_az = g.cols();
    const Eigen::Index n_ext = 2 * n_el - 2;
    CMat e(n_ext, n_az);
    e.topRows(n_el) = g;
    for (Eigen::Index j = n_el; j < n_ext; ++j) {
        const Eigen::Index mirror = 2 * (n_el - 1) - j;
        for (Eigen::Index i = 0; i < n_az; ++i)
            e(j, i) = sign * g(mirror, (i + n_az / 2) % n_az);
    }
    return e;
}

std::vector<int> harmonics(int n, int max_order)
{
    std::vector<int> h;
    for (int k = 0; k < n; ++k) {
        const int s = signed_bin(k, n);
        if (max_order < 0 || std::abs(s) <= max_order)
            h.push_back(s);
    }
    return h;
}

CMat select(const CMat& c, const std::vector<int>& el, const std::vector<int>& az)
{
    const int n_el = static_cast<int>(c.rows());
    const int n_az = static_cast<int>(c.cols());
    CMat out(static_cast<Eigen::Index>(el.size()), static_cast<Eigen::Index>(az.size()));
    for (std::size_t a = 0; a < el.size(); ++a)
        for (std::size_t b = 0; b < az.size(); ++b)
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                c(unsigned_bin(el[a], n_el), unsigned_bin(az[b], n_az));
    return out;
}

} // namespace

AntennaResponse::AntennaResponse(double azimuth_origin, std::vector<int> az_harmonics,
                                 std::vector<int> el_harmonics, CMat coef_h, CMat coef_v)
    : az0_(azimuth_origin), az_(std::move(az_harmonics)), el_(std::move(el_harmonics)),
      coef_h_(std::move(coef_h)), coef_v_(std::move(coef_v))
{
}

Vector2cd AntennaResponse::operator()(double azimuth, double elevation) const
{
    CVec ea(static_cast<Eigen::Index>(az_.size()));
    for (std::size_t b = 0; b < az_.size(); ++b)
        ea(static_cast<Eigen::Index>(b)) = std::polar(1.0, az_[b] * (azimuth - az0_));
    CVec ee(static_cast<Eigen::Index>(el_.size()));
    for (std::size_t a = 0; a < el_.size(); ++a)
        ee(static_cast<Eigen::Index>(a)) = std::polar(1.0, el_[a] * elevation);
    return {ee.transpose() * coef_h_ * ea, ee.transpose() * coef_v_ * ea};
}

AntennaResponse eadf_fit(const PatternGrid& pattern, int max_az_order, int max_el_order,
                         Continuation continuation)
{
    const auto n_az = pattern.azimuth.size();
    const auto n_el = pattern.elevation.size();
    if (n_az < 2 || n_az % 2 != 0)
        throw UnsupportedGrid("EADF needs an even number (>= 2) of azimuth samples");
    if (n_el < 2)
        throw UnsupportedGrid("EADF needs at least two elevation samples");
    if (!uniform(pattern.azimuth, pattern.azimuth(0), kTwoPi / static_cast<double>(n_az)))
        throw UnsupportedGrid("azimuth samples must be uniform over a full turn");
    if (!uniform(pattern.elevation, 0.0, kPi / static_cast<double>(n_el - 1)))
        throw UnsupportedGrid("elevation samples must be uniform from 0 to pi inclusive");
    if (pattern.h.rows() != n_el || pattern.h.cols() != n_az || pattern.v.rows() != n_el ||
        pattern.v.cols() != n_az)
        throw UnsupportedGrid("pattern sample matrices must be N_theta x N_phi");

    const CMat ch = dft2(periodify(pattern.h, continuation));
    const CMat cv = dft2(periodify(pattern.v, continuation));
    auto az = harmonics(static_cast<int>(n_az), max_az_order);
    auto el = harmonics(static_cast<int>(2 * n_el - 2), max_el_order);
    CMat sh = select(ch, el, az);
    CMat sv = select(cv, el, az);
    return {pattern.azimuth(0), std::move(az), std::move(el), std::move(sh), std::move(sv)};
}

PatternGrid sample_pattern(const PatternFunction& fn, int n_az, int n_el)
{
    if (n_az < 2 || n_el < 2)
        throw UnsupportedGrid("pattern grid too small");
    PatternGrid g;
    g.azimuth = VecX<double>::LinSpaced(n_az, -kPi, kPi - kTwoPi / n_az);
    g.elevation = VecX<double>::LinSpaced(n_el, 0.0, kPi);
    g.h.resize(n_el, n_az);
    g.v.resize(n_el, n_az);
    for (int j = 0; j < n_el; ++j)
        for (int i = 0; i < n_az; ++i) {
            const Vector2cd s = fn(g.azimuth(i), g.elevation(j));
            g.h(j, i) = s(0);
            g.v(j, i) = s(1);
        }
    return g;
}

double patch_amplitude(double azimuth, double elevation)
{
    const double gain = std::pow(10.0, kPatchPeakGainDbi / 20.0);
    const double cos_off = std::sin(elevation) * std::cos(azimuth);
    return gain * std::pow(0.5 * (1.0 + cos_off), 4);
}

namespace {

// The synthetic patterns are trigonometric polynomials of degree <= 4, so
// a 16 x 9 grid and order 4 represent them exactly.
constexpr int kSyntheticAz = 16;
constexpr int kSyntheticEl = 9;
constexpr int kSyntheticOrder = 4;

std::shared_ptr<const AntennaResponse> fit_synthetic(const PatternFunction& fn,
                                                     Continuation continuation = Continuation::even)
{
    return std::make_shared<const AntennaResponse>(eadf_fit(sample_pattern(fn, kSyntheticAz, kSyntheticEl),
                                                            kSyntheticOrder, kSyntheticOrder, continuation));
}

} // namespace

std::shared_ptr<const AntennaResponse> patch_response(Polarization pol)
{
    return fit_synthetic([pol](double az, double el) {
        const double g = patch_amplitude(az, el);
        return pol == Polarization::horizontal ? Vector2cd(g, 0.0) : Vector2cd(0.0, g);
    });
}

std::shared_ptr<const AntennaResponse> dipole_response()
{
    const double gain = std::pow(10.0, kDipolePeakGainDbi / 20.0);
    return fit_synthetic([gain](double, double el) { return Vector2cd(0.0, gain * std::sin(el)); },
                         Continuation::odd);
}

std::shared_ptr<const AntennaResponse> isotropic_response(Polarization pol)
{
    return fit_synthetic([pol](double, double) {
        return pol == Polarization::horizontal ? Vector2cd(1.0, 0.0) : Vector2cd(0.0, 1.0);
    });
}

Eigen::Vector3d direction(double azimuth, double elevation)
{
    return {std::sin(elevation) * std::cos(azimuth), std::sin(elevation) * std::sin(azimuth), std::cos(elevation)};
}

std::pair<double, double> angles_of(const Eigen::Vector3d& dir)
{
    const Eigen::Vector3d u = dir.normalized();
    const double el = std::acos(std::clamp(u.z(), -1.0, 1.0));
    const double horiz = std::hypot(u.x(), u.y());
    const double az = horiz < 1e-12 ? 0.0 : wrap_pi(std::atan2(u.y(), u.x()));
    return {az, el};
}

} // namespace sounder
