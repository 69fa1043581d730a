#pragma once

#include <array>
#include <cstddef>

#include "memesent/corpus.hpp"

namespace memesent {

/// Distribution over {negative, neutral, positive}, indexed by class index.
struct ProbDist3 {
    std::array<double, kNumClasses> p{};

    double operator[](std::size_t c) const { return p[c]; }
    double operator[](Sentiment s) const { return p[index_of(s)]; }

    /// Ties go to the lowest class index.
    Sentiment argmax() const noexcept {
        std::size_t best = 0;
        for (std::size_t c = 1; c < kNumClasses; ++c) {
            if (p[c] > p[best]) best = c;
        }
        return static_cast<Sentiment>(best);
    }

    friend bool operator==(const ProbDist3&, const ProbDist3&) = default;
};

}  // namespace memesent
