#pragma once

#include <cstdint>
#include <random>

namespace garchci {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// A reproducible random stream identified by (seed, stream_id).
///
/// Two streams built from the same pair produce identical draws. Distinct
/// stream ids are decorrelated by hashing the pair into the engine seed.
/// A stream must not be shared between threads.
class RngStream {
public:
    using engine_type = std::mt19937_64;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) : RngStream(seed, stream_id, 0) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t tag() const noexcept { return tag_; }

    /// Independent child stream for one role inside a replication
    /// (path simulation, stable weights of a given order, ...).
    RngStream substream(std::uint64_t tag) const {
        return RngStream(seed_, stream_id_, splitmix64(tag_ ^ splitmix64(tag + 1)));
    }

    engine_type& engine() noexcept { return engine_; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        double u;
        do {
            u = std::generate_canonical<double, 53>(engine_);
        } while (u <= 0.0);
        return u;
    }

private:
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t tag)
        : seed_(seed), stream_id_(stream_id), tag_(tag) {
        const std::uint64_t a = splitmix64(seed);
        const std::uint64_t b = splitmix64(a ^ stream_id);
        const std::uint64_t c = splitmix64(b ^ tag);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t tag_;
    engine_type engine_;
};

}  // namespace garchci
