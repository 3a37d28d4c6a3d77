#pragma once

#include <complex>
#include <cstddef>

namespace krsim::detail {

// In-place power-of-two FFT, unnormalized:
//   sign = +1:  a[t] <- sum_s a[s] exp(+2*pi*i*s*t/n)
//   sign = -1:  a[t] <- sum_s a[s] exp(-2*pi*i*s*t/n)
// Deterministic for a fixed input (single code path, cached twiddle tables).
void fft_pow2(std::complex<double>* a, std::size_t n, int sign);

}  // namespace krsim::detail
