#ifndef TAILINV_RNG_HPP
#define TAILINV_RNG_HPP

#include <cstdint>

namespace tailinv::rng {

// Counter-based generator built on the splitmix64 finalizer.  Every draw is a
// pure function of (seed, stream, counter), so parallel chunks produce the
// same values regardless of how the counter range is partitioned across
// threads.

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ stream);
    return splitmix64(h ^ counter);
}

/// Uniform draw in the open interval (0,1); never returns 0 or 1.
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return (static_cast<double>(bits(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Stateful view over one stream, for call sites that just want a sequence.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
    double next() { return u01(seed_, stream_, counter_++); }
    std::uint64_t next_bits() { return bits(seed_, stream_, counter_++); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace tailinv::rng

#endif
