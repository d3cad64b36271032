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

// Back-to-back hardware responses of the RF chains: estimation through a
// known attenuator, completion of unmeasured chain pairs, and removal from
// measured transfer functions.

#ifndef SOUNDER_CALIB_HPP
#define SOUNDER_CALIB_HPP

#include "sounder/tensor.hpp"
#include "sounder/types.hpp"
#include "sounder/waveform.hpp"

#include <utility>
#include <vector>

namespace sounder {

/// Chain-pair responses b(p_T, p_R, k) on the occupied bins.
class B2bSet
{
public:
    B2bSet() = default;
    B2bSet(int chains, Eigen::Index tones);

    /// Every off-diagonal pair set to b = 1.
    static B2bSet identity(int chains, Eigen::Index tones);

    int chains() const { return chains_; }
    Eigen::Index tones() const { return tones_; }

    bool has(int tx_chain, int rx_chain) const;
    const CVec& at(int tx_chain, int rx_chain) const;
    void set(int tx_chain, int rx_chain, CVec response);
    void erase(int tx_chain, int rx_chain);
    std::size_t measured_count() const;

    CVec attenuator; // s21 of the attenuator used for the captures, may be empty

private:
    std::size_t index(int tx_chain, int rx_chain) const;

    int chains_ = 0;
    Eigen::Index tones_ = 0;
    std::vector<CVec> b_;
    std::vector<char> mask_;
};

/// b(k) = Y(k) / (x(k) s21(k)) on the occupied bins. `y` holds either all
/// L bins of the spectral capture or only the occupied ones.
CVec b2b_response(const CVec& y, const ToneSpec<double>& tones, const CVec& s21_att);

/// Unordered chain connections {p, q} that seed the completion; each
/// connection measures both directions. There are 2(N - 2) + 1 of them.
std::vector<std::pair<int, int>> required_connections(int chains);

struct CompletionResult
{
    B2bSet set;
    double residual = 0.0;      // worst relative error on redundant measured pairs
    std::size_t redundant = 0;  // measured pairs not needed by the seed
};

/// Fills the pairs between chains p, q >= 2 as
/// b(p, q) = b(0, q) b(p, 1) / b(0, 1); every pair involving chain 0 or 1
/// is a seed and must be measured. Measured pairs outside the seed set are
/// kept and feed the residual.
CompletionResult complete_combinations(const B2bSet& partial);

/// Divides each chain pair by its b; unmeasured entries stay zero.
ChannelTensor remove_hardware(const ChannelTensor& h, const B2bSet& bset);

} // namespace sounder

#endif // SOUNDER_CALIB_HPP
