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

#ifndef SOUNDER_TYPES_HPP
#define SOUNDER_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace sounder {

// Dense types, templated on the real scalar.
template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVecX = VecX<std::complex<Real>>;

template <typename Real>
using CMatX = MatX<std::complex<Real>>;

using cd = std::complex<double>;
using CVec = CVecX<double>;
using CMat = CMatX<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into [-pi, pi).
inline double wrap_pi(double a)
{
    double w = std::fmod(a + kPi, kTwoPi);
    if (w < 0.0)
        w += kTwoPi;
    return w - kPi;
}

} // namespace sounder

#endif // SOUNDER_TYPES_HPP
