#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace gossip {

// 64-bit avalanche finalizer (SplitMix64). Platform-independent by
// construction; every randomized choice in the simulator funnels through
// this mixer so that runs replay bit-identically.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// SplitMix64 stream. The standard <random> distributions are
// implementation-defined, so uniform/normal/gamma sampling is done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m =
            static_cast<unsigned __int128>(next_u64()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal via Box-Muller (no carried state).
    double normal() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = next_double();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

    // Fisher-Yates; deterministic replacement for std::shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Named sub-stream tags. Every (tag, node, round) triple owns an
// independent stream, which makes draws order-independent across nodes.
enum class Stream : std::uint64_t {
    Roles = 1,
    Bootstrap,
    Seeds,
    SeedRefresh,
    PushTarget,
    PullTarget,
    FloodTarget,
    FloodPayload,
    PullResponse,
    Training,
    DataGen,
    Partition,
};

inline Rng substream(std::uint64_t master, Stream tag, std::uint64_t a = 0,
                     std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
    h = mix64(h + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(tag));
    h = mix64(h + 0x9e3779b97f4a7c15ULL * (a + 1));
    h = mix64(h + 0x9e3779b97f4a7c15ULL * (b + 1));
    h = mix64(h + 0x9e3779b97f4a7c15ULL * (c + 1));
    return Rng(h);
}

}  // namespace gossip
