#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rclab {

/// Philox4x32-10 block function. Stateless: every draw is a pure
/// function of (key, counter), so chains can be replayed from any point.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9U;
                key[1] += 0xBB67AE85U;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53U} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based stream keyed by (seed, stream id). A draw is addressed by
/// (counter, index, lane): chains use counter = sweep number and index = edge
/// or vertex id, so replicas need no coordination.
class CounterRng {
public:
    CounterRng() = default;
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        const std::uint64_t k = splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::array<std::uint32_t, 4> raw(std::uint64_t counter, std::uint32_t index, std::uint32_t lane) const {
        return Philox4x32::generate(
            {static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32), index, lane}, key_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter, std::uint32_t index, std::uint32_t lane = 0) const {
        const auto r = raw(counter, index, lane);
        const std::uint64_t bits = (static_cast<std::uint64_t>(r[0]) << 21) ^ (r[1] >> 11);
        return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
    }

    bool operator==(const CounterRng& o) const { return seed_ == o.seed_ && stream_ == o.stream_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::array<std::uint32_t, 2> key_{};
};

/// Sequential draws on top of CounterRng for code that just wants a stream.
class SequentialRng {
public:
    SequentialRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t lane = 7)
        : rng_(seed, stream), lane_(lane) {}
    double uniform() {
        const double u = rng_.uniform(counter_ >> 32, static_cast<std::uint32_t>(counter_), lane_);
        ++counter_;
        return u;
    }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform();
        while (u <= 0.0) u = uniform();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(6.283185307179586 * v);
        has_spare_ = true;
        return r * std::cos(6.283185307179586 * v);
    }
    std::uint64_t position() const { return counter_; }

private:
    CounterRng rng_;
    std::uint32_t lane_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rclab
