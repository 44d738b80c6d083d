#ifndef SBL_RNG_HPP
#define SBL_RNG_HPP

#include <cstdint>
#include <random>

namespace sbl {

/// Deterministic uniform draws on top of the standard-mandated mt19937_64
/// stream. The explicit 53-bit mapping avoids std::uniform_real_distribution,
/// whose output is not pinned down by the standard across implementations.
inline double uniform_unit(std::mt19937_64& gen) {
    return (gen() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(gen);
}

/// Uniform integer in [0, bound) without modulo bias beyond 2^-53.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t bound) {
    return static_cast<std::uint64_t>(uniform_unit(gen) * static_cast<double>(bound)) %
           (bound == 0 ? 1 : bound);
}

}  // namespace sbl

#endif
