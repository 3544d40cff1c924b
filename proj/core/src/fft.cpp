#include "fft.hpp"

#include "fbmloss/errors.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace fbm::detail {

Fft::Fft(std::size_t size) : size_(size) {
    if (size == 0 || (size & (size - 1)) != 0) {
        throw DomainError("FFT size must be a power of two");
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < size) {
        ++bits;
    }
    reversed_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b) {
            r |= ((i >> b) & 1u) << (bits - 1 - b);
        }
        reversed_[i] = r;
    }
    cos_.resize(size / 2);
    sin_.resize(size / 2);
    for (std::size_t k = 0; k < size / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
        cos_[k] = std::cos(angle);
        sin_[k] = std::sin(angle);
    }
}

void Fft::transform(std::span<double> re, std::span<double> im) const {
    const std::size_t n = size_;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = reversed_[i];
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const double wr = cos_[k * stride];
                const double wi = sin_[k * stride];
                const std::size_t a = start + k;
                const std::size_t b = a + half;
                const double tr = re[b] * wr - im[b] * wi;
                const double ti = re[b] * wi + im[b] * wr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
            }
        }
    }
}

} // namespace fbm::detail
