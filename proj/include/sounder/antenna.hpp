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

// Antenna responses stored as an effective aperture distribution function
// (EADF): the 2-D Fourier series of the pattern periodified over the
// sphere. Elevation is measured from zenith, theta in [0, pi]; azimuth
// phi in [-pi, pi).

#ifndef SOUNDER_ANTENNA_HPP
#define SOUNDER_ANTENNA_HPP

#include "sounder/types.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace sounder {

using Vector2cd = Eigen::Matrix<cd, 2, 1>;

/// Complex pattern samples on a regular grid: `azimuth` has N_phi points
/// spaced 2 pi / N_phi, `elevation` N_theta points from 0 to pi inclusive.
/// Sample matrices are N_theta x N_phi, one per polarization component.
struct PatternGrid
{
    VecX<double> azimuth;
    VecX<double> elevation;
    CMat h;
    CMat v;
};

/// Polarimetric antenna response as EADF coefficients.
class AntennaResponse
{
public:
    AntennaResponse() = default;
    AntennaResponse(double azimuth_origin, std::vector<int> az_harmonics, std::vector<int> el_harmonics,
                    CMat coef_h, CMat coef_v);

    /// (H, V) complex gain toward (azimuth, elevation) in the antenna frame.
    Vector2cd operator()(double azimuth, double elevation) const;

    const CMat& coefficients_h() const { return coef_h_; }
    const CMat& coefficients_v() const { return coef_v_; }
    const std::vector<int>& azimuth_harmonics() const { return az_; }
    const std::vector<int>& elevation_harmonics() const { return el_; }

    double reference_hz = 0.0;

private:
    double az0_ = 0.0;
    std::vector<int> az_;
    std::vector<int> el_;
    CMat coef_h_; // rows: elevation harmonics, cols: azimuth harmonics
    CMat coef_v_;
};

/// How the pattern is continued past the poles onto theta in (pi, 2 pi):
/// g(phi, 2 pi - theta) = +/- g(phi + pi, theta). `odd` suits components
/// that are tangential field projections, such as the V port of a dipole,
/// which otherwise pick up a kink at the poles.
enum class Continuation { even, odd };

/// Fits the EADF of a sampled pattern. Negative orders keep every harmonic,
/// in which case the series reproduces the grid samples exactly.
AntennaResponse eadf_fit(const PatternGrid& pattern, int max_az_order = -1, int max_el_order = -1,
                         Continuation continuation = Continuation::even);

inline Vector2cd eadf_eval(const AntennaResponse& r, double azimuth, double elevation)
{
    return r(azimuth, elevation);
}

using PatternFunction = std::function<Vector2cd(double azimuth, double elevation)>;

/// Samples `fn` on an n_az x n_el grid suitable for eadf_fit.
PatternGrid sample_pattern(const PatternFunction& fn, int n_az, int n_el);

/// Peak gain of the synthetic panel element, cable and switch losses included.
inline constexpr double kPatchPeakGainDbi = -0.4;
/// Peak gain of the synthetic half-wave dipole.
inline constexpr double kDipolePeakGainDbi = 2.15;

enum class Polarization { horizontal, vertical };

/// Smooth patch-like amplitude pattern, boresight along the local +x axis:
/// g ((1 + cos psi) / 2)^4, 10 dB down at 60 degrees off boresight.
double patch_amplitude(double azimuth, double elevation);

/// Synthetic EADF responses used when no chamber data is supplied.
std::shared_ptr<const AntennaResponse> patch_response(Polarization pol);
std::shared_ptr<const AntennaResponse> dipole_response();
std::shared_ptr<const AntennaResponse> isotropic_response(Polarization pol);

/// Unit vector toward (azimuth, elevation).
Eigen::Vector3d direction(double azimuth, double elevation);

/// Inverse of `direction`; azimuth is reported as 0 at the poles.
std::pair<double, double> angles_of(const Eigen::Vector3d& dir);

} // namespace sounder

#endif // SOUNDER_ANTENNA_HPP
