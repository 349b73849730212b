#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hdm {

// Counter-based generator: every draw is a pure function of (key, counter),
// so parallel fills indexed by position are bit-identical to serial ones.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash2(std::uint64_t key, std::uint64_t ctr) {
    return mix64(mix64(key) ^ (ctr * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
}

// Uniform on the open interval (0, 1).
inline double uniform_at(std::uint64_t key, std::uint64_t ctr) {
    return (static_cast<double>(hash2(key, ctr) >> 11) + 0.5) * 0x1.0p-53;
}

inline double normal_at(std::uint64_t key, std::uint64_t ctr) {
    double u1 = uniform_at(key, 2 * ctr), u2 = uniform_at(key, 2 * ctr + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double rademacher_at(std::uint64_t key, std::uint64_t ctr) {
    return (hash2(key, ctr) >> 63) ? 1.0 : -1.0;
}

// Named sub-stream of a seed, e.g. substream(seed, 'X').
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + 0x51ed270b27d8a1c3ULL));
}

// Replicate seeds: root seed XOR replicate index.
inline std::uint64_t replicate_seed(std::uint64_t root, std::uint64_t rep) { return root ^ rep; }

// Sequential convenience wrapper over the counter scheme.
class Stream {
public:
    explicit Stream(std::uint64_t key) : key_(key) {}
    double uniform() { return uniform_at(key_, ctr_++); }
    double normal() { return normal_at(key_, ctr_++); }
    double rademacher() { return rademacher_at(key_, ctr_++); }
    std::uint64_t counter() const { return ctr_; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace hdm
