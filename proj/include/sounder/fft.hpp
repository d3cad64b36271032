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

#ifndef SOUNDER_FFT_HPP
#define SOUNDER_FFT_HPP

#include "sounder/types.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace sounder {

/// Unnormalized forward DFT, X(k) = sum_n x(n) exp(-j 2 pi k n / N).
template <typename Real>
CVecX<Real> dft(const CVecX<Real>& x)
{
    Eigen::FFT<Real> fft;
    std::vector<std::complex<Real>> in(x.data(), x.data() + x.size());
    std::vector<std::complex<Real>> out;
    fft.fwd(out, in);
    return Eigen::Map<const CVecX<Real>>(out.data(), static_cast<Eigen::Index>(out.size()));
}

/// Inverse DFT with 1/N scaling.
template <typename Real>
CVecX<Real> idft(const CVecX<Real>& X)
{
    Eigen::FFT<Real> fft;
    std::vector<std::complex<Real>> in(X.data(), X.data() + X.size());
    std::vector<std::complex<Real>> out;
    fft.inv(out, in);
    return Eigen::Map<const CVecX<Real>>(out.data(), static_cast<Eigen::Index>(out.size()));
}

/// Signed frequency index of DFT bin k for length n; the Nyquist bin of
/// even lengths maps to -n/2.
inline int signed_bin(int k, int n) { return k <= (n - 1) / 2 ? k : k - n; }

/// DFT bin holding signed frequency index q.
inline int unsigned_bin(int q, int n) { return ((q % n) + n) % n; }

} // namespace sounder

#endif // SOUNDER_FFT_HPP
