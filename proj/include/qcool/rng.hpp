#pragma once

#include <cstdint>

namespace qcool {

// splitmix64, used to expand seeds into full generator state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256** generator. Fully specified update rule, so streams are
// bit-identical across platforms and independent of the standard library.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Per-stream seed derivation: trajectory i under a master seed gets its own
// decorrelated stream, independent of scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
    SplitMix64 sm(master_seed ^ (0x9e3779b97f4a7c15ULL + stream_index * 0xd1342543de82ef95ULL));
    std::uint64_t a = sm.next();
    std::uint64_t b = sm.next();
    return a ^ (b + stream_index);
}

}  // namespace qcool
