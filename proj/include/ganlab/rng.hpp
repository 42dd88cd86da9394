#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ganlab {

/// splitmix64 mixing step; used to derive child seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from a base seed and a list of salts. Every unit of
/// parallel work (replicate, restart, pool) owns a stream derived this way,
/// so results never depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salts);

/// Deterministic random stream. mt19937_64 has a standard-mandated algorithm
/// and we build doubles from raw bits ourselves, so sequences are identical
/// across platforms and standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (std::normal_distribution is
    /// implementation-defined, so we roll our own for reproducibility).
    double normal();

    /// Fair sign, +1.0 or -1.0.
    double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

    /// Independent child stream; advances this stream by one draw.
    RngStream child() { return RngStream(splitmix64(engine_())); }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ganlab
