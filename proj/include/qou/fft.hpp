#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qou {

// Forward/inverse complex DFT (FFTW backend, any length). inverse applies
// the 1/n normalization so inverse(forward(x)) == x.
std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& in);
std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& in);

// Linear correlation-style sum out[k] = sum_j w[k + off - j]... not general
// convolution: we need out[k] = sum_j w[k - j + shift] x[j] for weight taps
// indexed by (target index - source index). Implemented as a zero-padded
// circular convolution; falls back to the direct O(n*m) sum when that is
// cheaper.
//
// Concretely: given taps w[0..nw-1] and data x[0..nx-1], returns
// y[i] = sum_{j : 0 <= i - j < nw} w[i - j] * x[j] for i in [0, nx + nw - 1).
std::vector<double> convolve(const std::vector<double>& w, const std::vector<double>& x);

}  // namespace qou
