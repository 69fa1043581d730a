#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "memesent/corpus.hpp"
#include "memesent/errors.hpp"

namespace memesent {

struct RunResult {
    std::uint64_t seed = 0;
    double macro_f1 = 0.0;
};

struct StabilityReport {
    std::vector<RunResult> runs;  // ordered by seed
    double mean = 0.0;
    double variance = 0.0;         ///< population (divide by n)
    double sample_variance = 0.0;  ///< divide by n - 1
    double min = 0.0;
    double max = 0.0;

    std::size_t n_runs() const noexcept { return runs.size(); }
};

/// Aggregates per-run scores; the result does not depend on input order.
StabilityReport summarize(std::vector<RunResult> runs);

struct StudyConfig {
    double train_fraction = 0.8;
    std::uint64_t seed0 = 0;
    /// true: every run gets its own stratified split from its seed;
    /// false: all runs share the split drawn from seed0.
    bool resplit = true;
    unsigned threads = 1;
};

/// Trains on `train`, returns predictions for every record of `val` in order.
using TrainPredictFn =
    std::function<std::vector<Sentiment>(const Dataset& train, const Dataset& val, std::uint64_t seed)>;

class StudyRunError : public std::runtime_error {
public:
    StudyRunError(std::uint64_t seed, const std::string& what)
        : std::runtime_error("stability run with seed " + std::to_string(seed) + " failed: " + what), seed_(seed) {}
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// Runs seeds seed0 .. seed0 + n_runs - 1 and scores each on its validation
/// split with macro-F1. Throws StudyRunError naming the first failing seed.
StabilityReport stability_study(const TrainPredictFn& train_fn, const Dataset& dataset, const StudyConfig& cfg,
                                std::size_t n_runs);

nlohmann::json to_json(const StabilityReport& report);
std::string format_runs_csv(const StabilityReport& report);
std::string format_text(const StabilityReport& report);

}  // namespace memesent
