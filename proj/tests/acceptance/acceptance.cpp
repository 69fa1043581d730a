// Prints one PASS/FAIL line per acceptance criterion; exit status 0 iff every
// criterion that could be evaluated passed.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

#include "memesent/binary_io.hpp"
#include "memesent/ffnn_model.hpp"
#include "memesent/fusion.hpp"
#include "memesent/hsv.hpp"
#include "memesent/metrics.hpp"
#include "memesent/naive_bayes.hpp"
#include "memesent/nn.hpp"
#include "memesent/pipeline.hpp"
#include "memesent/rng.hpp"
#include "memesent/stability.hpp"
#include "synthetic.hpp"

using namespace memesent;
using memesent::testing::TempDir;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    bool evaluated = true;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

nn::Matrix<double> random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    auto rng = CounterRng::stream(seed, "acceptance_batch");
    nn::Matrix<double> m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
    }
    return m;
}

std::vector<int> random_int_labels(std::size_t n, std::uint64_t seed) {
    auto rng = CounterRng::stream(seed, "acceptance_labels");
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.uniform_index(3));
    return y;
}

std::vector<Sentiment> random_sentiments(CounterRng& rng, std::size_t n) {
    std::vector<Sentiment> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(sentiment_from_index(rng.uniform_index(3)));
    return v;
}

Outcome gradient_correctness() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        nn::NetSpec spec;
        spec.seed = seed;
        spec.init_mode = nn::InitMode::FanIn;
        const auto r = nn::grad_check<double>(spec, random_batch(8, spec.input_dim, seed), random_int_labels(8, seed),
                                              1e-5, 64);
        worst = std::max(worst, r.max_relative_error);
        checked += r.checked;
    }
    nn::NetSpec lin;
    lin.seed = 4;
    lin.activation = nn::Activation::Identity;
    lin.init_mode = nn::InitMode::FanIn;
    lin.init_sigma = std::sqrt(0.5);
    const auto rl = nn::grad_check<double>(lin, random_batch(8, lin.input_dim, 4), random_int_labels(8, 4), 3e-3, 64,
                                           nn::Stencil::Central4);
    const double secs = seconds_since(t0);
    return {worst < 1e-4 && rl.max_relative_error < 1e-7 && secs < 30.0,
            "relu max rel err " + fmt(worst) + " over " + std::to_string(checked) + " entries, linear " +
                fmt(rl.max_relative_error) + ", " + fmt(secs) + " s"};
}

double brute_macro_f1(const std::vector<Sentiment>& p, const std::vector<Sentiment>& g) {
    double sum = 0;
    for (const auto c : kAllSentiments) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            tp += (p[i] == c && g[i] == c);
            fp += (p[i] == c && g[i] != c);
            fn += (p[i] != c && g[i] == c);
        }
        const double prec = tp + fp == 0 ? 0 : tp / (tp + fp);
        const double rec = tp + fn == 0 ? 0 : tp / (tp + fn);
        sum += prec + rec == 0 ? 0 : 2 * prec * rec / (prec + rec);
    }
    return sum / 3.0;
}

Outcome metric_oracle() {
    auto rng = CounterRng::stream(7, "acceptance_metrics");
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto p = random_sentiments(rng, 100);
        const auto g = random_sentiments(rng, 100);
        worst = std::max(worst, std::abs(macro_f1(p, g).macro_f1 - brute_macro_f1(p, g)));
    }
    const auto g = random_sentiments(rng, 100);
    const double perfect = macro_f1(g, g).macro_f1;

    std::vector<Sentiment> gold(4160, Sentiment::Positive);
    gold.insert(gold.end(), 2201, Sentiment::Neutral);
    gold.insert(gold.end(), 631, Sentiment::Negative);
    const double all_pos = macro_f1(std::vector<Sentiment>(gold.size(), Sentiment::Positive), gold).macro_f1;
    return {worst <= 1e-12 && perfect == 1.0 && std::abs(all_pos - 0.2487) <= 1e-4,
            "max |cm - brute| " + fmt(worst) + ", perfect " + fmt(perfect) + ", all-positive " + fmt(all_pos)};
}

Outcome synthetic_end_to_end() {
    const auto t0 = Clock::now();
    const auto corpus = memesent::testing::keyword_corpus(300, 1);
    const auto [train, val] = stratified_split(corpus, 0.8, 1);
    const auto table = memesent::testing::toy_embedding_table(300, 1);
    nn::NetSpec spec;
    spec.seed = 1;
    nn::TrainConfig cfg;
    cfg.seed = 1;
    const auto model = ffnn_w2v_train(train.captions(), train.labels(), table, spec, cfg);
    std::vector<Sentiment> pred;
    for (const auto& p : ffnn_w2v_predict(model, val.captions(), table)) pred.push_back(p.probs.argmax());
    const double ffnn = macro_f1(pred, val.labels()).macro_f1;

    const auto nb = nb_train(preprocess_all(train.captions(), PrepConfig::defaults()), train.labels(), 1.0);
    pred.clear();
    for (const auto& c : val.captions()) pred.push_back(nb_predict(nb, preprocess(c, PrepConfig::defaults())).argmax());
    const double nbf1 = macro_f1(pred, val.labels()).macro_f1;
    const double secs = seconds_since(t0);
    return {ffnn >= 0.95 && nbf1 >= 0.90 && secs < 60.0, "ffnn_w2v macro-F1 " + fmt(ffnn) + " (batch " +
                                                             std::to_string(cfg.batch_size) + ", " +
                                                             std::to_string(cfg.epochs) + " epochs), nb " +
                                                             fmt(nbf1) + ", " + fmt(secs) + " s"};
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(MEMESENT_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
    TempDir dir("memesent-acceptance");
    write_dataset(memesent::testing::keyword_corpus(120, 3), dir / "data.csv");
    write_word2vec_binary(memesent::testing::toy_embedding_table(300, 3), dir / "emb.bin");
    const std::string common = " --dataset '" + (dir / "data.csv").string() + "' --embeddings '" +
                               (dir / "emb.bin").string() + "'";
    bool ok = true;
    for (const std::string run : {"a", "b"}) {
        ok = ok && run_cli("train" + common + " --seed 5 --split 0.8 --out '" + (dir / run).string() + "'") == 0;
        ok = ok && run_cli("predict" + common + " --model-file '" + (dir / run / "model.bin").string() + "' --out '" +
                           (dir / run / "pred").string() + "'") == 0;
    }
    if (!ok) return {false, "cli run failed"};
    const bool same_model = read_file_bytes(dir / "a" / "model.bin") == read_file_bytes(dir / "b" / "model.bin");
    const bool same_pred = read_text_file(dir / "a" / "pred" / "predictions.csv") ==
                               read_text_file(dir / "b" / "pred" / "predictions.csv") &&
                           read_text_file(dir / "a" / "validation_predictions.csv") ==
                               read_text_file(dir / "b" / "validation_predictions.csv");

    const auto ds = memesent::testing::keyword_corpus(60, 3);
    StudyConfig sc;
    sc.threads = 2;
    const auto rep = stability_study(
        [](const Dataset&, const Dataset& val, std::uint64_t) {
            return std::vector<Sentiment>(val.size(), Sentiment::Positive);
        },
        ds, sc, 20);
    return {same_model && same_pred && rep.variance == 0.0,
            std::string("model bytes ") + (same_model ? "identical" : "differ") + ", predictions " +
                (same_pred ? "identical" : "differ") + ", constant-scorer variance " + fmt(rep.variance)};
}

Outcome format_fidelity() {
    TempDir dir("memesent-acceptance");
    const auto t = memesent::testing::toy_embedding_table(300, 11);
    write_word2vec_binary(t, dir / "a.bin");
    const auto back = load_embeddings(dir / "a.bin", EmbeddingFormat::Binary);
    write_word2vec_binary(back, dir / "b.bin");
    const bool bytes_equal = read_file_bytes(dir / "a.bin") == read_file_bytes(dir / "b.bin");

    write_word2vec_text(t, dir / "a.txt");
    const auto from_text = load_embeddings(dir / "a.txt", EmbeddingFormat::Text);
    double worst = 0.0;
    const auto& vt = from_text.vectors();
    const auto& vb = back.vectors();
    const bool same_shape = from_text.words() == back.words() && vt.rows() == vb.rows() && vt.cols() == vb.cols();
    if (same_shape) {
        for (Eigen::Index i = 0; i < vt.rows(); ++i) {
            for (Eigen::Index j = 0; j < vt.cols(); ++j) {
                const double scale = std::max(1.0, std::abs(vb(i, j)));
                worst = std::max(worst, std::abs(vt(i, j) - vb(i, j)) / scale);
            }
        }
    }
    const bool text_ok = same_shape && worst <= std::numeric_limits<float>::epsilon();

    const bool hsv_ok = rgb_to_hsv(1, 0, 0) == std::array<double, 3>{0, 1, 1} &&
                        rgb_to_hsv(0, 1, 0) == std::array<double, 3>{1.0 / 3.0, 1, 1} &&
                        rgb_to_hsv(0, 0, 1) == std::array<double, 3>{2.0 / 3.0, 1, 1} &&
                        rgb_to_hsv(0.5, 0.5, 0.5) == std::array<double, 3>{0, 0, 0.5};
    return {bytes_equal && text_ok && hsv_ok, std::string("binary round trip ") +
                                                  (bytes_equal ? "byte-identical" : "differs") +
                                                  ", text vs binary max rel diff " + fmt(worst) + ", hsv " +
                                                  (hsv_ok ? "exact" : "mismatch")};
}

Outcome fusion_sanity() {
    auto labels = [](std::size_t n, std::uint64_t seed) {
        auto rng = CounterRng::stream(seed, "acceptance_fusion");
        return random_sentiments(rng, n);
    };
    const ProbDist3 uniform{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    auto perfect = [](const std::vector<Sentiment>& y) {
        std::vector<ProbDist3> out;
        for (const auto s : y) {
            ProbDist3 d;
            d.p[index_of(s)] = 1.0;
            out.push_back(d);
        }
        return out;
    };
    const auto ytrain = labels(300, 1);
    const auto yval = labels(150, 2);
    const auto ttrain = perfect(ytrain);
    const std::vector<ProbDist3> itrain(ytrain.size(), uniform);
    StackerConfig cfg;
    cfg.seed = 3;
    const auto st = fusion_train(ttrain, itrain, ytrain, cfg);
    const auto tval = perfect(yval);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < yval.size(); ++i) ok += fusion_predict(st, tval[i], uniform) == yval[i];
    const auto features = fusion_features(tval, std::vector<ProbDist3>(yval.size(), uniform));
    const double acc = static_cast<double>(ok) / static_cast<double>(yval.size());
    return {acc == 1.0 && features.cols() == 6 && st.weight.cols() == 6,
            "held-out accuracy " + fmt(acc) + ", feature dimension " + std::to_string(features.cols())};
}

Outcome real_data_stability() {
    const char* data = std::getenv("MEMESENT_DATA");
    const char* emb = std::getenv("MEMESENT_EMBEDDINGS");
    if (!data || !emb) {
        return {false, "not evaluated: set MEMESENT_DATA (Memotion labels csv) and MEMESENT_EMBEDDINGS", false};
    }
    const auto t0 = Clock::now();
    const auto ds = load_dataset(data, Schema::memotion());
    PipelineConfig cfg;
    const std::string emb_path = emb;
    const auto format =
        emb_path.ends_with(".txt") || emb_path.ends_with(".vec") ? EmbeddingFormat::Text : EmbeddingFormat::Binary;
    EmbeddingLoadOptions opts;
    opts.vocabulary = corpus_vocabulary(ds, cfg.prep);
    const auto table = load_embeddings(emb_path, format, opts);
    StudyConfig sc;
    sc.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto rep = stability_study(
        [&](const Dataset& train, const Dataset& val, std::uint64_t seed) {
            Resources res{&table, nullptr};
            const auto model = train_model(train, cfg.with_seed(seed), res);
            return argmax_all(predict_model(model, val, res));
        },
        ds, sc, 50);
    const double secs = seconds_since(t0);
    return {rep.mean >= 0.30 && rep.mean <= 0.38 && rep.max >= rep.mean,
            "n=50 mean " + fmt(rep.mean) + ", variance " + fmt(rep.variance) + ", max " + fmt(rep.max) + ", " +
                fmt(secs) + " s"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 gradient correctness", gradient_correctness},
        {"2 metric oracle", metric_oracle},
        {"3 synthetic end-to-end", synthetic_end_to_end},
        {"4 determinism", determinism},
        {"5 format fidelity", format_fidelity},
        {"6 fusion sanity", fusion_sanity},
        {"7 real-data stability", real_data_stability},
    };
    bool all_ok = true;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << name << "] " << o.detail << '\n' << std::flush;
        if (o.evaluated) all_ok = all_ok && o.pass;
    }
    return all_ok ? 0 : 1;
}
