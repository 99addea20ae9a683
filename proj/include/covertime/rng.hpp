#pragma once

#include <cstdint>
#include <random>

namespace covertime {

// All randomness in the library flows from a single user seed. Every Monte
// Carlo trial owns a private generator derived from (seed, purpose, subexp,
// trial), so results do not depend on worker count or scheduling.

namespace stream {
// Purpose tags keep trial streams of different experiments decorrelated.
enum : std::uint64_t {
    walk = 1,
    gff = 2,
    gff_rhs = 3,
    brownian = 4,
    exp_sum = 5,
    discrete_path = 6,
    cover = 7,
    hitting = 8,
    sojourn = 9,
    edge_min = 10,
    generic = 11,
};
}  // namespace stream

/// SplitMix64 finalizer; full-avalanche mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a generator for one trial of one experiment.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t purpose,
                                 std::uint64_t subexp, std::uint64_t trial) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ purpose);
    s = mix64(s ^ subexp);
    s = mix64(s ^ trial);
    return std::mt19937_64(s);
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t purpose,
                                 std::uint64_t trial) {
    return trial_rng(seed, purpose, 0, trial);
}

/// Compensated (Kahan) accumulator. Keeps the accounting identity between a
/// walk's elapsed time and its summed holding times tight over 1e8+ jumps.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }
    void reset() { sum_ = 0.0; comp_ = 0.0; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace covertime
