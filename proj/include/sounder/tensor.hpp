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

#ifndef SOUNDER_TENSOR_HPP
#define SOUNDER_TENSOR_HPP

#include "sounder/types.hpp"

#include <unsupported/Eigen/CXX11/Tensor>

#include <string>
#include <vector>

namespace sounder {

/// Six-index record, axes (s, p_T, p_R, m_T, m_R, k-or-i), row-major.
using Tensor6 = Eigen::Tensor<cd, 6, Eigen::RowMajor>;

enum class TensorKind {
    raw,        // averaged time samples D
    spectral,   // DFT of D over all L bins, Y
    hardware,   // Y / x on occupied bins, chain responses still included
    calibrated, // propagation and antennas only
};

std::string to_string(TensorKind kind);
TensorKind tensor_kind_from_string(const std::string& s);

struct ChannelTensor
{
    TensorKind kind = TensorKind::raw;
    Tensor6 values;
    VecX<double> axis; // sample index, or absolute RF frequency in Hz
    std::vector<int> n_tx;
    std::vector<int> n_rx;

    Eigen::Index snapshots() const { return values.dimension(0); }
    Eigen::Index chains() const { return values.dimension(1); }
    Eigen::Index bins() const { return values.dimension(5); }

    /// True for (p_T, p_R, m_T, m_R) the schedule actually measures.
    bool measured(int tx_chain, int rx_chain, int tx_antenna, int rx_antenna) const
    {
        return tx_chain != rx_chain && tx_antenna < n_tx[static_cast<std::size_t>(tx_chain)] &&
               rx_antenna < n_rx[static_cast<std::size_t>(rx_chain)];
    }

    /// Copies the last axis of one entry into a vector.
    CVec row(int s, int pt, int pr, int mt, int mr) const
    {
        CVec v(bins());
        for (Eigen::Index k = 0; k < bins(); ++k)
            v(k) = values(s, pt, pr, mt, mr, k);
        return v;
    }

    void set_row(int s, int pt, int pr, int mt, int mr, const CVec& v)
    {
        for (Eigen::Index k = 0; k < bins(); ++k)
            values(s, pt, pr, mt, mr, k) = v(k);
    }
};

/// Zero tensor shaped for `snapshots` snapshots of the given chain layout.
ChannelTensor make_tensor(TensorKind kind, int snapshots, const std::vector<int>& n_tx,
                          const std::vector<int>& n_rx, Eigen::Index bins);

} // namespace sounder

#endif // SOUNDER_TENSOR_HPP
