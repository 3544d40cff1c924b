#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbm::detail {

// In-place iterative radix-2 DFT, X_j = sum_k x_k exp(-2 pi i j k / n), on
// split real/imaginary arrays. Twiddles and the bit-reversal table are built
// once per size; `transform` is const and may be shared between threads.
class Fft {
public:
    explicit Fft(std::size_t size);

    std::size_t size() const noexcept { return size_; }
    void transform(std::span<double> re, std::span<double> im) const;

private:
    std::size_t size_;
    std::vector<std::size_t> reversed_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

} // namespace fbm::detail
