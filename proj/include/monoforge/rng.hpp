#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace monoforge {

/// Mixes a master seed with a stream id (splitmix64 finalizer). Used to carve
/// independent streams for projections, masks, initialization and data.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded 64-bit generator with explicit, serializable state.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// +1 or -1 with equal probability.
    double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

    std::string serialize() const;
    static Rng deserialize(const std::string& state);

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace monoforge
