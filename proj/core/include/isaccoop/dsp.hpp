#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isaccoop/common.hpp"

namespace isaccoop {

/// In-place iterative radix-2 transform; size must be a power of two.
/// Forward uses exp(-j*2*pi*nk/N); inverse uses exp(+j*2*pi*nk/N) without
/// the 1/N normalization (callers that need unitarity scale themselves).
void fft_inplace(std::vector<cdouble>& data, bool inverse);

size_t next_pow2(size_t n);

/// Zero-padded inverse DFT of a length-N vector onto a grid of size
/// next_pow2(N*pad).  With an input carrying a -j*2*pi*n*delta_f*tau phase
/// ramp, bin k of the result corresponds to delay k/(size*delta_f) where
/// size is the length of the returned vector.
std::vector<cdouble> padded_idft(const Eigen::VectorXcd& spectrum, int pad_factor);

}  // namespace isaccoop
