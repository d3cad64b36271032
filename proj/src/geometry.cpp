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

#include "sounder/geometry.hpp"
#include "sounder/errors.hpp"

#include <cmath>

namespace sounder {

Eigen::Matrix3d yaw_rotation(double yaw)
{
    return Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

Eigen::Vector3d PanelGeometry::position(int m) const
{
    if (m < 0 || m >= size())
        throw InvalidInput("antenna index out of range for " + (name.empty() ? std::string("array") : name));
    return center + rotation * elements[static_cast<std::size_t>(m)].position;
}

Vector2cd PanelGeometry::response(int m, double azimuth, double elevation) const
{
    if (m < 0 || m >= size())
        throw InvalidInput("antenna index out of range for " + (name.empty() ? std::string("array") : name));
    const auto& el = elements[static_cast<std::size_t>(m)];
    const Eigen::Vector3d u = direction(azimuth, elevation);
    const auto [az_local, el_local] = angles_of(rotation.transpose() * u);
    const double k = kTwoPi * carrier_hz / kSpeedOfLight;
    const cd steer = std::polar(1.0, k * u.dot(rotation * el.position));
    return (*el.response)(az_local, el_local) * steer;
}

Eigen::Matrix<cd, Eigen::Dynamic, 2> PanelGeometry::manifold(double azimuth, double elevation, int count) const
{
    const int n = count < 0 ? size() : count;
    if (n > size())
        throw InvalidInput("manifold requested for more elements than the array holds");
    const Eigen::Vector3d u = direction(azimuth, elevation);
    const auto [az_local, el_local] = angles_of(rotation.transpose() * u);
    const double k = kTwoPi * carrier_hz / kSpeedOfLight;
    Eigen::Matrix<cd, Eigen::Dynamic, 2> a(n, 2);
    for (int m = 0; m < n; ++m) {
        const auto& el = elements[static_cast<std::size_t>(m)];
        const cd steer = std::polar(1.0, k * u.dot(rotation * el.position));
        a.row(m) = ((*el.response)(az_local, el_local) * steer).transpose();
    }
    return a;
}

double PanelGeometry::boresight_azimuth() const
{
    const Eigen::Vector3d x = rotation * Eigen::Vector3d::UnitX();
    return std::atan2(x.y(), x.x());
}

PanelGeometry make_panel(const Eigen::Vector3d& center, double yaw, double carrier_hz, double spacing)
{
    PanelGeometry g;
    g.name = "panel";
    g.center = center;
    g.rotation = yaw_rotation(yaw);
    g.carrier_hz = carrier_hz;
    const auto v = patch_response(Polarization::vertical);
    const auto h = patch_response(Polarization::horizontal);
    std::vector<Eigen::Vector3d> grid;
    for (int m = 0; m < 8; ++m) {
        const double col = static_cast<double>(m % 4) - 1.5;
        const double row = static_cast<double>(m / 4) - 0.5;
        grid.emplace_back(0.0, col * spacing, -row * spacing);
    }
    for (const auto& p : grid)
        g.elements.push_back({p, v, 'V'});
    for (const auto& p : grid)
        g.elements.push_back({p, h, 'H'});
    return g;
}

PanelGeometry make_dipole(const Eigen::Vector3d& center, double carrier_hz)
{
    PanelGeometry g;
    g.name = "dipole";
    g.center = center;
    g.carrier_hz = carrier_hz;
    g.elements.push_back({Eigen::Vector3d::Zero(), dipole_response(), 'V'});
    return g;
}

PanelGeometry make_isotropic(const Eigen::Vector3d& center, double carrier_hz, Polarization pol)
{
    PanelGeometry g;
    g.name = "isotropic";
    g.center = center;
    g.carrier_hz = carrier_hz;
    g.elements.push_back(
        {Eigen::Vector3d::Zero(), isotropic_response(pol), pol == Polarization::horizontal ? 'H' : 'V'});
    return g;
}

} // namespace sounder
