#include "memesent/stability.hpp"

#include <algorithm>
#include <exception>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "memesent/metrics.hpp"

namespace memesent {

StabilityReport summarize(std::vector<RunResult> runs) {
    if (runs.empty()) throw ValidationError("stability summary needs at least one run");
    std::sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) { return a.seed < b.seed; });
    StabilityReport r;
    r.runs = std::move(runs);
    const double n = static_cast<double>(r.runs.size());
    const double origin = r.runs.front().macro_f1;
    double shifted = 0.0;
    r.min = r.max = origin;
    for (const auto& run : r.runs) {
        shifted += run.macro_f1 - origin;
        r.min = std::min(r.min, run.macro_f1);
        r.max = std::max(r.max, run.macro_f1);
    }
    r.mean = origin + shifted / n;
    double ss = 0.0;
    for (const auto& run : r.runs) ss += (run.macro_f1 - r.mean) * (run.macro_f1 - r.mean);
    r.variance = ss / n;
    r.sample_variance = r.runs.size() > 1 ? ss / (n - 1.0) : 0.0;
    r.mean = std::clamp(r.mean, r.min, r.max);
    return r;
}

StabilityReport stability_study(const TrainPredictFn& train_fn, const Dataset& dataset, const StudyConfig& cfg,
                                std::size_t n_runs) {
    if (n_runs < 2) throw ValidationError("a stability study needs at least 2 runs");
    std::optional<std::pair<Dataset, Dataset>> shared;
    if (!cfg.resplit) shared = stratified_split(dataset, cfg.train_fraction, cfg.seed0);

    std::vector<RunResult> results(n_runs);
    std::vector<std::exception_ptr> errors(n_runs);
    auto run_one = [&](std::size_t i) {
        const std::uint64_t seed = cfg.seed0 + i;
        try {
            const auto parts = shared ? *shared : stratified_split(dataset, cfg.train_fraction, seed);
            const auto preds = train_fn(parts.first, parts.second, seed);
            results[i] = {seed, macro_f1(preds, parts.second.labels()).macro_f1};
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n_runs)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n_runs; ++i) {
            run_one(i);
            if (errors[i]) break;
        }
    } else {
        std::mutex m;
        std::size_t next = 0;
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard lock(m);
                        if (next >= n_runs) return;
                        i = next++;
                    }
                    run_one(i);
                }
            });
        }
    }
    for (std::size_t i = 0; i < n_runs; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw StudyRunError(cfg.seed0 + i, e.what());
        }
    }
    return summarize(std::move(results));
}

nlohmann::json to_json(const StabilityReport& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs) runs.push_back({{"seed", run.seed}, {"macro_f1", run.macro_f1}});
    return {{"n_runs", r.n_runs()}, {"mean", r.mean},  {"variance", r.variance}, {"sample_variance", r.sample_variance},
            {"min", r.min},         {"max", r.max},    {"runs", runs}};
}

std::string format_runs_csv(const StabilityReport& r) {
    std::ostringstream out;
    out << "seed,macro_f1\n" << std::setprecision(17);
    for (const auto& run : r.runs) out << run.seed << ',' << run.macro_f1 << '\n';
    return out.str();
}

std::string format_text(const StabilityReport& r) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "Mean" << std::setw(12) << "Variance" << std::setw(10) << "Max"
        << "No. of runs\n";
    out << std::fixed << std::setprecision(4) << std::setw(10) << r.mean << std::scientific << std::setprecision(1)
        << std::setw(12) << r.variance << std::fixed << std::setprecision(4) << std::setw(10) << r.max << r.n_runs()
        << "\n";
    return out.str();
}

}  // namespace memesent
