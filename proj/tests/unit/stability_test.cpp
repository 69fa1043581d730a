#include <doctest.h>

#include <algorithm>
#include <mutex>
#include <cmath>

#include <nlohmann/json.hpp>

#include "memesent/rng.hpp"
#include "memesent/csv.hpp"
#include "memesent/stability.hpp"
#include "synthetic.hpp"

using namespace memesent;

namespace {

std::vector<Sentiment> constant(const Dataset& val, Sentiment s) { return std::vector<Sentiment>(val.size(), s); }

/// Gold labels with a seed-dependent fraction flipped.
TrainPredictFn noisy_oracle() {
    return [](const Dataset&, const Dataset& val, std::uint64_t seed) {
        auto rng = CounterRng::stream(seed, "oracle");
        auto y = val.labels();
        for (auto& s : y) {
            if (rng.uniform01() < 0.3) s = sentiment_from_index(rng.uniform_index(3));
        }
        return y;
    };
}

}  // namespace

TEST_CASE("summary statistics match a brute-force recomputation") {
    auto rng = CounterRng::stream(1, "stab");
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RunResult> runs;
        const auto n = 2 + rng.uniform_index(60);
        for (std::size_t i = 0; i < n; ++i) runs.push_back({n - i, rng.uniform01()});
        const auto rep = summarize(runs);
        double sum = 0;
        for (const auto& r : runs) sum += r.macro_f1;
        const double mean = sum / static_cast<double>(n);
        double ss = 0, lo = 1, hi = 0;
        for (const auto& r : runs) {
            ss += (r.macro_f1 - mean) * (r.macro_f1 - mean);
            lo = std::min(lo, r.macro_f1);
            hi = std::max(hi, r.macro_f1);
        }
        CHECK(std::abs(rep.mean - mean) <= 1e-12);
        CHECK(std::abs(rep.variance - ss / static_cast<double>(n)) <= 1e-12);
        CHECK(std::abs(rep.sample_variance - ss / static_cast<double>(n - 1)) <= 1e-12);
        CHECK(rep.min == lo);
        CHECK(rep.max == hi);
        CHECK(rep.min <= rep.mean);
        CHECK(rep.mean <= rep.max);
        CHECK(rep.variance >= 0.0);
        CHECK(rep.runs.front().seed == 1);
    }
}

TEST_CASE("summary does not depend on run order") {
    std::vector<RunResult> runs = {{3, 0.31}, {1, 0.35}, {2, 0.29}, {4, 0.33}};
    const auto a = summarize(runs);
    std::reverse(runs.begin(), runs.end());
    const auto b = summarize(runs);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
}

TEST_CASE("constant scorer has zero variance") {
    const auto ds = memesent::testing::keyword_corpus(45, 1);
    const auto rep = stability_study(
        [](const Dataset&, const Dataset& val, std::uint64_t) { return constant(val, Sentiment::Positive); }, ds,
        StudyConfig{}, 10);
    CHECK(rep.n_runs() == 10);
    CHECK(rep.variance == 0.0);
    CHECK(rep.mean == rep.max);
}

TEST_CASE("study is deterministic and thread count does not matter") {
    const auto ds = memesent::testing::keyword_corpus(90, 2);
    StudyConfig cfg;
    cfg.seed0 = 100;
    const auto a = stability_study(noisy_oracle(), ds, cfg, 12);
    const auto b = stability_study(noisy_oracle(), ds, cfg, 12);
    cfg.threads = 4;
    const auto c = stability_study(noisy_oracle(), ds, cfg, 12);
    REQUIRE(a.runs.size() == 12);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].seed == 100 + i);
        CHECK(a.runs[i].macro_f1 == b.runs[i].macro_f1);
        CHECK(a.runs[i].macro_f1 == c.runs[i].macro_f1);
    }
    CHECK(a.variance > 0.0);
    CHECK(format_runs_csv(a) == format_runs_csv(c));
}

TEST_CASE("resplit controls the validation partition") {
    const auto ds = memesent::testing::keyword_corpus(60, 3);
    std::vector<std::string> first_ids;
    std::mutex mu;
    auto record = [&](const Dataset&, const Dataset& val, std::uint64_t) {
        std::lock_guard lock(mu);
        first_ids.push_back(val[0].id + val[1].id + val[2].id);
        return val.labels();
    };
    StudyConfig cfg;
    cfg.resplit = false;
    stability_study(record, ds, cfg, 5);
    CHECK(std::all_of(first_ids.begin(), first_ids.end(), [&](const auto& s) { return s == first_ids[0]; }));
    first_ids.clear();
    cfg.resplit = true;
    stability_study(record, ds, cfg, 5);
    CHECK_FALSE(std::all_of(first_ids.begin(), first_ids.end(), [&](const auto& s) { return s == first_ids[0]; }));
}

TEST_CASE("failures name the seed") {
    const auto ds = memesent::testing::keyword_corpus(30, 4);
    StudyConfig cfg;
    cfg.seed0 = 10;
    auto fail_on_13 = [](const Dataset&, const Dataset& val, std::uint64_t seed) {
        if (seed == 13) throw std::runtime_error("boom");
        return val.labels();
    };
    try {
        stability_study(fail_on_13, ds, cfg, 6);
        FAIL("expected StudyRunError");
    } catch (const StudyRunError& e) {
        CHECK(e.seed() == 13);
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }
    CHECK_THROWS_AS(stability_study(fail_on_13, ds, cfg, 1), ValidationError);
    auto wrong_len = [](const Dataset&, const Dataset&, std::uint64_t) { return std::vector<Sentiment>{}; };
    CHECK_THROWS_AS(stability_study(wrong_len, ds, cfg, 2), StudyRunError);
}

TEST_CASE("report outputs") {
    const auto rep = summarize({{0, 0.25}, {1, 0.75}});
    const auto j = to_json(rep);
    CHECK(j["mean"] == 0.5);
    CHECK(j["variance"] == 0.0625);
    CHECK(j["n_runs"] == 2);
    const auto csv = parse_csv(format_runs_csv(rep));
    CHECK(csv.header == std::vector<std::string>{"seed", "macro_f1"});
    CHECK(csv.rows.size() == 2);
    CHECK(format_text(rep).find("0.5") != std::string::npos);
}
