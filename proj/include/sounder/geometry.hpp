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

// Element placement of the antenna panels and standalone antennas, and
// the plane-wave array manifold built from it.

#ifndef SOUNDER_GEOMETRY_HPP
#define SOUNDER_GEOMETRY_HPP

#include "sounder/antenna.hpp"
#include "sounder/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sounder {

struct ArrayElement
{
    Eigen::Vector3d position = Eigen::Vector3d::Zero(); // panel frame, metres
    std::shared_ptr<const AntennaResponse> response;
    char port = 'V'; // polarization port label, 'H' or 'V'
};

/// Antennas behind one RF chain: a rigid body placed at `center` with
/// orientation `rotation` (panel frame to global frame).
struct PanelGeometry
{
    std::string name;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    double carrier_hz = 5.675e9;
    std::vector<ArrayElement> elements;

    int size() const { return static_cast<int>(elements.size()); }

    /// Global position of element m.
    Eigen::Vector3d position(int m) const;

    /// Pattern times steering phase of element m toward the global
    /// direction (azimuth, elevation), as an (H, V) pair.
    Vector2cd response(int m, double azimuth, double elevation) const;

    /// Responses of the first `count` elements (all when negative), one
    /// row per element.
    Eigen::Matrix<cd, Eigen::Dynamic, 2> manifold(double azimuth, double elevation, int count = -1) const;

    /// Global azimuth of the panel boresight (local +x).
    double boresight_azimuth() const;
};

/// Nominal element pitch of the patch panels.
inline constexpr double kPanelSpacing = 0.0267;

/// Dual-polarized 2 x 4 patch panel with 16 ports, boresight along the
/// global azimuth `yaw`. Ports 0..7 are the V ports and 8..15 the H ports
/// of elements 0..7; element m sits in column m % 4 and row m / 4.
PanelGeometry make_panel(const Eigen::Vector3d& center, double yaw, double carrier_hz,
                         double spacing = kPanelSpacing);

/// Vertical half-wave dipole, omnidirectional in azimuth.
PanelGeometry make_dipole(const Eigen::Vector3d& center, double carrier_hz);

/// A single isotropic antenna with the given port.
PanelGeometry make_isotropic(const Eigen::Vector3d& center, double carrier_hz,
                             Polarization pol = Polarization::vertical);

/// Rotation about the global z axis.
Eigen::Matrix3d yaw_rotation(double yaw);

} // namespace sounder

#endif // SOUNDER_GEOMETRY_HPP
