#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace chanfront {

// Philox4x32-10 counter-based generator (Salmon et al., Random123 family).
// A stream is a pure function of (key, counter), so path simulations keyed
// by (seed, path index) are reproducible for any thread count and can be
// replayed without storing paths.
class RngStream {
public:
    RngStream(std::uint64_t key_hi, std::uint64_t key_lo)
        : k0_(static_cast<std::uint32_t>(key_lo)),
          k1_(static_cast<std::uint32_t>(key_lo >> 32)),
          kx_(key_hi) {}

    // Uniform on (0,1), 53-bit mantissa.
    double u01() {
        std::uint64_t r = next64();
        return (static_cast<double>(r >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = u01(), u2 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform on [a, b).
    double uniform(double a, double b) { return a + (b - a) * u01(); }

    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return next64() % n; }

private:
    std::uint32_t k0_, k1_;
    std::uint64_t kx_;     // folded into the counter block
    std::uint64_t ctr_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;

    static void round(std::array<std::uint32_t, 4>& x, std::uint32_t k0, std::uint32_t k1) {
        constexpr std::uint64_t M0 = 0xD2511F53ull, M1 = 0xCD9E8D57ull;
        std::uint64_t p0 = M0 * x[0];
        std::uint64_t p1 = M1 * x[2];
        std::array<std::uint32_t, 4> y;
        y[0] = static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0;
        y[1] = static_cast<std::uint32_t>(p1);
        y[2] = static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1;
        y[3] = static_cast<std::uint32_t>(p0);
        x = y;
    }

    std::array<std::uint32_t, 4> block(std::uint64_t ctr) const {
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        std::array<std::uint32_t, 4> x = {
            static_cast<std::uint32_t>(ctr),
            static_cast<std::uint32_t>(ctr >> 32),
            static_cast<std::uint32_t>(kx_),
            static_cast<std::uint32_t>(kx_ >> 32)};
        std::uint32_t k0 = k0_, k1 = k1_;
        for (int r = 0; r < 10; ++r) {
            round(x, k0, k1);
            k0 += W0;
            k1 += W1;
        }
        return x;
    }

    std::uint32_t next32() {
        if (buf_pos_ == 4) {
            buf_ = block(ctr_++);
            buf_pos_ = 0;
        }
        return buf_[buf_pos_++];
    }

    std::uint64_t next64() {
        std::uint64_t lo = next32();
        std::uint64_t hi = next32();
        return (hi << 32) | lo;
    }
};

// 64-bit mix (splitmix64 finalizer), used to derive substream keys.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Disjoint substream keyed by (seed, tag, index): used for per-cell draws
// and per-path Monte Carlo streams.
inline RngStream substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t a = mix64(seed ^ mix64(tag));
    std::uint64_t b = mix64(a ^ mix64(index + 0x632BE59BD9B4E019ull));
    return RngStream(a, b);
}

} // namespace chanfront
