#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace jsk {

class JoinGraph;
struct SketchConfig;

/// Arithmetic in the Mersenne prime field p = 2^61 - 1.
namespace mersenne {

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

constexpr std::uint64_t reduce(std::uint64_t x) noexcept {
    std::uint64_t r = (x & kPrime) + (x >> 61);
    return r >= kPrime ? r - kPrime : r;
}

constexpr std::uint64_t mul(std::uint64_t a, std::uint64_t b) noexcept {
    unsigned __int128 z = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(z) & kPrime;
    std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
    return reduce(lo + hi);
}

constexpr std::uint64_t add(std::uint64_t a, std::uint64_t b) noexcept {
    return reduce(a + b);
}

/// Horner evaluation; coeffs[0] is the highest-degree coefficient.
template <std::size_t N>
constexpr std::uint64_t poly(const std::array<std::uint64_t, N>& coeffs, std::uint64_t x) noexcept {
    x = reduce(x);
    std::uint64_t acc = 0;
    for (std::uint64_t c : coeffs) acc = add(mul(acc, x), c);
    return acc;
}

}  // namespace mersenne

/// SplitMix64 finalizer. Also used as the counter-mode stream behind every
/// seed derivation, so its constants are part of the sketch file contract.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class HashKind : std::uint64_t { sign = 1, bin = 2, ams_sign = 3 };

/// Draws uniform field elements for one (kind, id, repetition, counter) key.
class CoefficientStream {
public:
    CoefficientStream(std::uint64_t seed, HashKind kind, std::uint64_t id,
                      std::uint64_t repetition, std::uint64_t counter = 0) noexcept;

    /// Key material shared by every counter of one (kind, id, repetition).
    static std::uint64_t prefix(std::uint64_t seed, HashKind kind, std::uint64_t id,
                                std::uint64_t repetition) noexcept;
    /// Equivalent to the five-argument constructor given its prefix.
    static CoefficientStream from_prefix(std::uint64_t prefix, std::uint64_t counter) noexcept;

    std::uint64_t next() noexcept;

private:
    CoefficientStream() = default;

    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
};

/// 4-wise independent +-1 function: parity of a random cubic over F_p.
struct SignHash {
    std::array<std::uint64_t, 4> coefficients{};
    std::size_t edge = 0;
    std::size_t repetition = 0;

    int operator()(std::uint64_t x) const noexcept {
        return 1 - 2 * static_cast<int>(mersenne::poly(coefficients, x) & 1U);
    }

    static SignHash derive(std::uint64_t seed, HashKind kind, std::uint64_t key,
                           std::uint64_t repetition, std::uint64_t counter = 0) noexcept;

    bool operator==(const SignHash&) const = default;
};

/// 2-wise independent bin function: random line over F_p, then mod m.
struct BinHash {
    std::array<std::uint64_t, 2> coefficients{};
    std::size_t component = 0;
    std::size_t repetition = 0;
    std::uint64_t m = 1;

    std::uint64_t operator()(std::uint64_t x) const noexcept {
        return mersenne::poly(coefficients, x) % m;
    }

    bool operator==(const BinHash&) const = default;
};

inline int sign_eval(const SignHash& h, std::uint64_t x) noexcept { return h(x); }
inline std::uint64_t bin_eval(const BinHash& h, std::uint64_t x) noexcept { return h(x); }

/// All hash functions of one sketching run. Sign hashes are indexed
/// [repetition][edge], bin hashes [repetition][component index].
struct HashSet {
    std::size_t repetitions = 0;
    std::size_t edge_count = 0;
    std::size_t component_count = 0;
    std::vector<SignHash> signs;
    std::vector<BinHash> bins;

    const SignHash& sign(std::size_t rep, std::size_t edge) const {
        return signs[rep * edge_count + edge];
    }
    const BinHash& bin(std::size_t rep, std::size_t component) const {
        return bins[rep * component_count + component];
    }

    bool operator==(const HashSet&) const = default;
};

/// Stable key of the edge {u, v}; independent of edge list order.
constexpr std::uint64_t edge_key(std::size_t u, std::size_t v) noexcept {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

HashSet derive_hash_set(const SketchConfig& config, const JoinGraph& graph);

}  // namespace jsk
