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

#include "sounder/calib.hpp"
#include "sounder/errors.hpp"

#include <algorithm>
#include <string>

namespace sounder {

std::string to_string(TensorKind kind)
{
    switch (kind) {
    case TensorKind::raw: return "raw";
    case TensorKind::spectral: return "spectral";
    case TensorKind::hardware: return "hardware";
    case TensorKind::calibrated: return "calibrated";
    }
    return "raw";
}

TensorKind tensor_kind_from_string(const std::string& s)
{
    for (auto k : {TensorKind::raw, TensorKind::spectral, TensorKind::hardware, TensorKind::calibrated})
        if (to_string(k) == s)
            return k;
    throw SchemaError("unknown tensor kind '" + s + "'");
}

ChannelTensor make_tensor(TensorKind kind, int snapshots, const std::vector<int>& n_tx, const std::vector<int>& n_rx,
                          Eigen::Index bins)
{
    if (n_tx.size() != n_rx.size() || n_tx.empty())
        throw InvalidInput("tensor chain layout mismatch");
    ChannelTensor t;
    t.kind = kind;
    t.n_tx = n_tx;
    t.n_rx = n_rx;
    const auto chains = static_cast<Eigen::Index>(n_tx.size());
    const Eigen::Index max_t = std::max(1, *std::max_element(n_tx.begin(), n_tx.end()));
    const Eigen::Index max_r = std::max(1, *std::max_element(n_rx.begin(), n_rx.end()));
    t.values.resize(snapshots, chains, chains, max_t, max_r, bins);
    t.values.setZero();
    t.axis = VecX<double>::LinSpaced(bins, 0.0, static_cast<double>(bins - 1));
    return t;
}

B2bSet::B2bSet(int chains, Eigen::Index tones)
    : chains_(chains), tones_(tones), b_(static_cast<std::size_t>(chains * chains)),
      mask_(static_cast<std::size_t>(chains * chains), 0)
{
    if (chains < 1 || tones < 1)
        throw InvalidInput("b2b set needs at least one chain and one tone");
}

B2bSet B2bSet::identity(int chains, Eigen::Index tones)
{
    B2bSet s(chains, tones);
    for (int p = 0; p < chains; ++p)
        for (int q = 0; q < chains; ++q)
            if (p != q)
                s.set(p, q, CVec::Ones(tones));
    return s;
}

std::size_t B2bSet::index(int tx_chain, int rx_chain) const
{
    if (tx_chain < 0 || tx_chain >= chains_ || rx_chain < 0 || rx_chain >= chains_)
        throw InvalidInput("chain index out of range in b2b set");
    return static_cast<std::size_t>(tx_chain * chains_ + rx_chain);
}

bool B2bSet::has(int tx_chain, int rx_chain) const { return mask_[index(tx_chain, rx_chain)] != 0; }

const CVec& B2bSet::at(int tx_chain, int rx_chain) const
{
    const auto i = index(tx_chain, rx_chain);
    if (!mask_[i])
        throw CalibrationIncomplete("no back-to-back response for chain pair (" + std::to_string(tx_chain) + ", " +
                                    std::to_string(rx_chain) + ")");
    return b_[i];
}

void B2bSet::set(int tx_chain, int rx_chain, CVec response)
{
    if (tx_chain == rx_chain)
        throw InvalidInput("a chain has no back-to-back response with itself");
    if (response.size() != tones_)
        throw InvalidInput("b2b response length does not match the tone count");
    if ((response.array().abs() == 0.0).any())
        throw DegenerateDivision("b2b response vanishes on an occupied bin");
    const auto i = index(tx_chain, rx_chain);
    b_[i] = std::move(response);
    mask_[i] = 1;
}

void B2bSet::erase(int tx_chain, int rx_chain)
{
    const auto i = index(tx_chain, rx_chain);
    b_[i] = CVec();
    mask_[i] = 0;
}

std::size_t B2bSet::measured_count() const
{
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

CVec b2b_response(const CVec& y, const ToneSpec<double>& tones, const CVec& s21_att)
{
    const auto F = tones.tone_count();
    CVec yk;
    if (y.size() == tones.length())
        yk = tones.gather(y);
    else if (y.size() == F)
        yk = y;
    else
        throw InvalidInput("b2b capture must hold L or F bins");
    if (s21_att.size() != F)
        throw InvalidInput("attenuator trace must hold one value per occupied tone");
    if ((s21_att.array().abs() == 0.0).any())
        throw DegenerateDivision("attenuator trace is zero on an occupied bin");
    const CVec x = tones.occupied_values();
    return yk.cwiseQuotient(x.cwiseProduct(s21_att));
}

std::vector<std::pair<int, int>> required_connections(int chains)
{
    if (chains < 2)
        throw InvalidInput("calibration needs at least two chains");
    std::vector<std::pair<int, int>> c;
    for (int q = 1; q < chains; ++q)
        c.emplace_back(0, q);
    for (int p = 2; p < chains; ++p)
        c.emplace_back(p, 1);
    return c;
}

CompletionResult complete_combinations(const B2bSet& partial)
{
    const int n = partial.chains();
    CompletionResult out;
    out.set = B2bSet(n, partial.tones());
    out.set.attenuator = partial.attenuator;
    if (n == 1)
        return out;

    // Both directions of every required connection {0, q} and {p, 1}.
    auto seed = [](int p, int q) { return p <= 1 || q <= 1; };
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (p != q && seed(p, q) && !partial.has(p, q))
                throw IncompleteSeed("seed pair (" + std::to_string(p) + ", " + std::to_string(q) +
                                     ") was not measured");

    const CVec& b01 = partial.at(0, 1);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (p == q)
                continue;
            if (seed(p, q)) {
                out.set.set(p, q, partial.at(p, q));
                continue;
            }
            const CVec est = partial.at(0, q).cwiseProduct(partial.at(p, 1)).cwiseQuotient(b01);
            if (partial.has(p, q)) {
                const CVec& meas = partial.at(p, q);
                const double rel = (est - meas).cwiseAbs().cwiseQuotient(meas.cwiseAbs()).maxCoeff();
                out.residual = std::max(out.residual, rel);
                ++out.redundant;
                out.set.set(p, q, meas);
            } else {
                out.set.set(p, q, est);
            }
        }
    return out;
}

ChannelTensor remove_hardware(const ChannelTensor& h, const B2bSet& bset)
{
    if (h.kind != TensorKind::hardware)
        throw InvalidInput("remove_hardware expects a tensor that still holds the chain responses");
    if (h.bins() != bset.tones())
        throw InvalidInput("tensor bins and b2b tones differ");
    ChannelTensor out = h;
    out.kind = TensorKind::calibrated;
    const int chains = static_cast<int>(h.chains());
    for (int pt = 0; pt < chains; ++pt)
        for (int pr = 0; pr < chains; ++pr) {
            if (pt == pr || h.n_tx[static_cast<std::size_t>(pt)] == 0 || h.n_rx[static_cast<std::size_t>(pr)] == 0)
                continue;
            const CVec& b = bset.at(pt, pr);
            for (Eigen::Index s = 0; s < h.snapshots(); ++s)
                for (int mt = 0; mt < h.n_tx[static_cast<std::size_t>(pt)]; ++mt)
                    for (int mr = 0; mr < h.n_rx[static_cast<std::size_t>(pr)]; ++mr)
                        for (Eigen::Index k = 0; k < h.bins(); ++k)
                            out.values(s, pt, pr, mt, mr, k) /= b(k);
        }
    return out;
}

} // namespace sounder
