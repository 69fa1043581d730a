#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace memesent {

/// Counter-based 64-bit generator.
///
/// Output i of a stream is splitmix64(key + (i + 1) * golden_gamma), so every
/// draw is a pure function of (key, counter). All sampling helpers below are
/// implemented here rather than through <random> distributions, whose output
/// is implementation-defined; a seed therefore reproduces the same numbers
/// on every platform and standard library.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key = 0) noexcept : key_(key) {}

    /// Derives an independent stream for a named purpose ("init", "shuffle", ...).
    static CounterRng stream(std::uint64_t seed, std::string_view name) noexcept;

    /// Same as stream() but with an additional integer index (fold, run, layer).
    static CounterRng stream(std::uint64_t seed, std::string_view name,
                             std::uint64_t index) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() noexcept;

    /// Standard normal via Box-Muller. Pairs are cached so each pair of
    /// uniforms yields two normals.
    double normal() noexcept;

    /// Uniform integer in [0, n). Unbiased (rejection). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a, used to turn stream names into keys.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Fisher-Yates shuffle driven by CounterRng.
template <typename T>
void shuffle(std::vector<T>& items, CounterRng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_index(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// 0..n-1 in a seeded random order.
std::vector<std::size_t> permutation(std::size_t n, CounterRng& rng);

}  // namespace memesent
