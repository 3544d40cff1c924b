#include "fbmloss/random.hpp"

#include "fbmloss/errors.hpp"

#include <cmath>

namespace fbm {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// 2^-53
constexpr double kInv53 = 1.0 / 9007199254740992.0;

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * kInv53;
}

template <std::size_t N>
inline double poly(const double (&c)[N], double x) noexcept {
    double acc = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) {
        acc = acc * x + c[i];
    }
    return acc;
}

// AS241 coefficients, lowest order first.
constexpr double kA[] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                         1.9715909503065514427e+3, 1.3731693765509461125e+4,
                         4.5921953931549871457e+4, 6.7265770927008700853e+4,
                         3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[] = {1.0,
                         4.2313330701600911252e+1, 6.8718700749205790830e+2,
                         5.3941960214247511077e+3, 2.1213794301586595867e+4,
                         3.9307895800092710610e+4, 2.8729085735721942674e+4,
                         5.2264952788528545610e+3};
constexpr double kC[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                         5.76949722146069140550e0, 3.64784832476320460504e0,
                         1.27045825245236838258e0, 2.41780725177450611770e-1,
                         2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[] = {1.0,
                         2.05319162663775882187e0, 1.67638483018380384940e0,
                         6.89767334985100004550e-1, 1.48103976427480074590e-1,
                         1.51986665636164571966e-2, 5.47593808499534494600e-4,
                         1.05075007164441684324e-9};
constexpr double kE[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                         1.78482653991729133580e0, 2.96560571828504891230e-1,
                         2.65321895265761230930e-2, 1.24266094738807843860e-3,
                         2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[] = {1.0,
                         5.99832206555887937690e-1, 1.36929880922735805310e-1,
                         1.48753612908506148525e-2, 7.86869131145613259100e-4,
                         1.84631831751005468180e-5, 1.42151175831644588870e-7,
                         2.04426310338993978564e-15};

} // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: p must lie in (0, 1)");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(kA, r) / poly(kB, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        z = poly(kC, r) / poly(kD, r);
    } else {
        r -= 5.0;
        z = poly(kE, r) / poly(kF, r);
    }
    return q < 0.0 ? -z : z;
}

double GaussianSource::next_uniform() noexcept {
    const std::uint64_t blk = position_ >> 1;
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32),
                                  static_cast<std::uint32_t>(seed_.stream_index),
                                  static_cast<std::uint32_t>(seed_.stream_index >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_.master_seed),
                              static_cast<std::uint32_t>(seed_.master_seed >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    const bool second = (position_ & 1u) != 0;
    ++position_;
    return second ? to_open_unit(out[2], out[3]) : to_open_unit(out[0], out[1]);
}

double GaussianSource::next() { return normal_quantile(next_uniform()); }

void GaussianSource::fill(std::span<double> out) {
    std::size_t i = 0;
    // Unaligned start: finish the half-used block first.
    if ((position_ & 1u) != 0 && i < out.size()) {
        out[i++] = next();
    }
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_.master_seed),
                              static_cast<std::uint32_t>(seed_.master_seed >> 32)};
    const auto s_lo = static_cast<std::uint32_t>(seed_.stream_index);
    const auto s_hi = static_cast<std::uint32_t>(seed_.stream_index >> 32);
    for (; i + 1 < out.size(); i += 2) {
        const std::uint64_t blk = position_ >> 1;
        const auto w = Philox4x32::block(
            {static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32), s_lo, s_hi}, key);
        out[i] = normal_quantile(to_open_unit(w[0], w[1]));
        out[i + 1] = normal_quantile(to_open_unit(w[2], w[3]));
        position_ += 2;
    }
    if (i < out.size()) {
        out[i] = next();
    }
}

} // namespace fbm
