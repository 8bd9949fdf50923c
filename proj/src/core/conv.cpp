#include "core/conv.hpp"

#include <cmath>
#include <mutex>
#include <unordered_map>

namespace geomatch {

void convolve_direct(const std::vector<double>& a, const std::vector<double>& b,
                     std::vector<double>& out) {
  const size_t n = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  const size_t alen = std::min(a.size(), n);
  for (size_t i = 0; i < alen; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    const size_t jmax = std::min(b.size(), n - i);
    double* dst = out.data() + i;
    for (size_t j = 0; j < jmax; ++j) dst[j] += ai * b[j];
  }
}

namespace detail {

namespace {

// Unit roots for a given power-of-two size, cached across calls. Computed
// with std::polar so twiddle error does not accumulate.
const std::vector<std::complex<double>>& root_table(size_t n) {
  static std::mutex mu;
  static std::unordered_map<size_t, std::vector<std::complex<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& entry = cache[n];
  if (entry.empty()) {
    entry.resize(n / 2);
    for (size_t j = 0; j < n / 2; ++j)
      entry[j] = std::polar(1.0, -2.0 * M_PI * double(j) / double(n));
  }
  return entry;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n < 2) return;
  const auto& roots = root_table(n);

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t stride = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t j = 0; j < len / 2; ++j) {
        std::complex<double> w = roots[j * stride];
        if (inverse) w = std::conj(w);
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / double(n);
    for (auto& x : a) x *= inv;
  }
}

}  // namespace detail

void convolve_fft(const std::vector<double>& a, const std::vector<double>& b,
                  std::vector<double>& out) {
  const size_t need = out.size();
  size_t n = 1;
  while (n < a.size() + b.size()) n <<= 1;

  // Pack both real inputs into one complex transform; the spectra separate
  // as A = (F(k) + conj(F(n-k)))/2, B = (F(k) - conj(F(n-k)))/(2i).
  std::vector<std::complex<double>> f(n);
  for (size_t i = 0; i < a.size(); ++i) f[i] = {a[i], 0.0};
  for (size_t i = 0; i < b.size(); ++i) f[i] += std::complex<double>(0.0, b[i]);
  detail::fft_inplace(f, false);

  std::vector<std::complex<double>> prod(n);
  for (size_t i = 0; i < n; ++i) {
    const std::complex<double> fi = f[i];
    const std::complex<double> fc = std::conj(f[(n - i) & (n - 1)]);
    const std::complex<double> ai = 0.5 * (fi + fc);
    const std::complex<double> bi =
        std::complex<double>(0.0, -0.5) * (fi - fc);
    prod[i] = ai * bi;
  }
  detail::fft_inplace(prod, true);

  for (size_t l = 0; l < need; ++l) out[l] = prod[l].real();
}

}  // namespace geomatch
