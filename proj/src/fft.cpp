#include "fft.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace krsim::detail {

namespace {

// Half-length table of e^{+2*pi*i*k/n}, k = 0..n/2-1, shared per size.
const std::vector<std::complex<double>>& twiddles(std::size_t n) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::vector<std::complex<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> w(n / 2);
    const double two_pi_over_n = 2.0 * M_PI / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k)
        w[k] = std::polar(1.0, two_pi_over_n * static_cast<double>(k));
    return cache.emplace(n, std::move(w)).first->second;
}

}  // namespace

void fft_pow2(std::complex<double>* a, std::size_t n, int sign) {
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
    if (n == 1) return;

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const auto& w = twiddles(n);
    const double im_sign = (sign >= 0) ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            std::size_t tw = 0;
            for (std::size_t off = 0; off < half; ++off, tw += stride) {
                const double wr = w[tw].real();
                const double wi = im_sign * w[tw].imag();
                std::complex<double>& u = a[base + off];
                std::complex<double>& v = a[base + off + half];
                const double vr = v.real() * wr - v.imag() * wi;
                const double vi = v.real() * wi + v.imag() * wr;
                v = {u.real() - vr, u.imag() - vi};
                u = {u.real() + vr, u.imag() + vi};
            }
        }
    }
}

}  // namespace krsim::detail
