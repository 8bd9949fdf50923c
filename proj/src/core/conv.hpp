#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace geomatch {

// Truncated discrete convolution: out[l] = sum_{i=0}^{l} a[i]*b[l-i] for
// l < out.size(). Both routes must agree to 1e-10; the FFT route is used for
// large truncation lengths, the direct O(L^2) route elsewhere.
void convolve_direct(const std::vector<double>& a, const std::vector<double>& b,
                     std::vector<double>& out);
void convolve_fft(const std::vector<double>& a, const std::vector<double>& b,
                  std::vector<double>& out);

namespace detail {
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);
}

}  // namespace geomatch
