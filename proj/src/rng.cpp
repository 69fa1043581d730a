#include "memesent/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace memesent {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += kGoldenGamma;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

CounterRng CounterRng::stream(std::uint64_t seed, std::string_view name) noexcept {
    return CounterRng(splitmix64(splitmix64(seed) ^ fnv1a64(name)));
}

CounterRng CounterRng::stream(std::uint64_t seed, std::string_view name,
                              std::uint64_t index) noexcept {
    return CounterRng(splitmix64(stream(seed, name).key() ^ splitmix64(index)));
}

std::uint64_t CounterRng::next_u64() noexcept {
    ++counter_;
    return splitmix64(key_ + counter_ * kGoldenGamma);
}

double CounterRng::uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t CounterRng::uniform_index(std::uint64_t n) noexcept {
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

std::vector<std::size_t> permutation(std::size_t n, CounterRng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    return order;
}

}  // namespace memesent
