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

// Scenario files: a JSON document describing the sounder, the arrays, the
// multipath scene and per-command options. Keys carry their unit as a
// suffix (_hz, _s, _deg, _m, _db, ...) and unknown keys are rejected.

#ifndef SOUNDER_SCENARIO_HPP
#define SOUNDER_SCENARIO_HPP

#include "sounder/channel.hpp"
#include "sounder/config.hpp"
#include "sounder/estimate.hpp"
#include "sounder/geometry.hpp"
#include "sounder/io.hpp"
#include "sounder/sage.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sounder {

struct ArraySpec
{
    std::string type = "panel"; // panel | dipole | isotropic
    Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
    double yaw_deg = 0.0;
    Polarization polarization = Polarization::vertical;
};

/// Line-of-sight path between two arrays, derived from their positions.
struct LosSpec
{
    int tx_chain = 0;
    int rx_chain = 1;
    std::optional<double> gain_db; // free-space gain when absent
    double doppler_hz = 0.0;
};

struct B2bCapture
{
    int tx_chain = 0;
    int rx_chain = 1;
    std::filesystem::path file; // L spectral bins as float64 I/Q
};

/// Synthetic factorizable chain responses for calibration runs without
/// captured data.
struct SyntheticChains
{
    double ripple_db = 1.0;
    double group_delay_s = 2e-9;
};

struct CalibrateOptions
{
    std::vector<B2bCapture> captures;
    std::optional<std::filesystem::path> attenuator_file;
    std::optional<SyntheticChains> synthetic;
    double attenuation_db = 30.0; // flat attenuator when no trace is given
};

struct Scenario
{
    std::string name;
    SounderConfig cfg;
    std::optional<double> repetition_s;
    SceneBounds bounds;
    std::vector<ArraySpec> arrays;
    std::vector<Mpc> paths;
    std::vector<LosSpec> los;
    double noise_power = 0.0; // per tensor entry, linear
    std::uint64_t seed = 1;
    int snapshots = 1;
    std::vector<int> stream_chains; // receive chains written by --raw-stream
    SageSettings sage;
    SubspaceBounds subspace;
    CalibrateOptions calibrate;
    std::filesystem::path base_dir;
};

/// Throws SchemaError on malformed input.
Scenario parse_scenario(const Json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);

std::vector<PanelGeometry> build_arrays(const Scenario& sc);

/// Explicit paths plus the line-of-sight paths implied by `los`.
std::vector<Mpc> scene_paths(const Scenario& sc, const std::vector<PanelGeometry>& arrays);

/// Parses "delay_ns=29:32,aoa_azimuth_deg=65:110" style bounds.
SubspaceBounds parse_subspace(const std::string& spec);

} // namespace sounder

#endif // SOUNDER_SCENARIO_HPP
