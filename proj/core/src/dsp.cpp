#include "isaccoop/dsp.hpp"

#include <cmath>

namespace isaccoop {

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<cdouble>& data, bool inverse) {
  const size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw NumericalError("fft size must be a nonzero power of two");
  }
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / static_cast<double>(len);
    const cdouble wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const cdouble u = data[i + k];
        const cdouble v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<cdouble> padded_idft(const Eigen::VectorXcd& spectrum, int pad_factor) {
  if (pad_factor < 1) throw NumericalError("pad factor must be >= 1");
  const size_t n = static_cast<size_t>(spectrum.size());
  const size_t m = next_pow2(n * static_cast<size_t>(pad_factor));
  std::vector<cdouble> buf(m, cdouble(0.0, 0.0));
  for (size_t i = 0; i < n; ++i) buf[i] = spectrum(static_cast<Eigen::Index>(i));
  fft_inplace(buf, /*inverse=*/true);
  return buf;
}

}  // namespace isaccoop
