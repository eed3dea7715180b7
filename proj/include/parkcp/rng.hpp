#ifndef PARKCP_RNG_HPP
#define PARKCP_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace parkcp {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so it plugs into
/// the <random> distributions. Chosen over mt19937 because the simulator builds
/// one short-lived generator per (run, vehicle, step, purpose) key and the
/// Mersenne Twister seeding cost dominates at that granularity.
class SplitMix64
{
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Order-sensitive 64-bit mix of a key tuple.
inline std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t p : parts) {
        SplitMix64 g(h ^ p);
        h = g() + 0x9e3779b97f4a7c15ULL * (h << 1 | 1);
    }
    return SplitMix64(h)();
}

/// What a random draw is for. Part of the substream key so that, e.g., adding a
/// range measurement never shifts a GPS draw.
enum class Purpose : std::uint64_t {
    Gps = 1,
    Range = 2,
    Velocity = 3,
    Swarm = 4,
    LinkDrop = 5,
    Scenario = 6,
    RunSeed = 7,
};

/// Independent generator for one (run seed, purpose, a, b, c) key.
inline SplitMix64 substream(std::uint64_t run_seed, Purpose purpose, std::uint64_t a = 0, std::uint64_t b = 0,
                            std::uint64_t c = 0)
{
    return SplitMix64(mix_key({run_seed, static_cast<std::uint64_t>(purpose), a, b, c}));
}

} // namespace parkcp

#endif
