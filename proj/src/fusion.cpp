#include "memesent/fusion.hpp"

#include <algorithm>

namespace memesent {

void FusionStacker::save(ByteWriter& out) const {
    for (Eigen::Index r = 0; r < weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < weight.cols(); ++c) out.f64(weight(r, c));
        out.f64(bias(r));
    }
}

FusionStacker FusionStacker::load(ByteReader& in) {
    FusionStacker s;
    for (Eigen::Index r = 0; r < s.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < s.weight.cols(); ++c) s.weight(r, c) = in.f64();
        s.bias(r) = in.f64();
    }
    if (!s.weight.allFinite() || !s.bias.allFinite()) throw FormatError("stacker has non-finite weights");
    return s;
}

FusionMatrix fusion_features(std::span<const ProbDist3> text, std::span<const ProbDist3> image) {
    if (text.size() != image.size()) {
        throw ValidationError("text and image predictions differ in length (" + std::to_string(text.size()) +
                              " vs " + std::to_string(image.size()) + ")");
    }
    FusionMatrix x(static_cast<Eigen::Index>(text.size()), static_cast<Eigen::Index>(kFusionFeatures));
    for (std::size_t i = 0; i < text.size(); ++i) {
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = text[i].p[c];
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(kNumClasses + c)) = image[i].p[c];
        }
    }
    return x;
}

FusionStacker fusion_train(std::span<const ProbDist3> text_probs, std::span<const ProbDist3> image_probs,
                           std::span<const Sentiment> labels, const StackerConfig& cfg) {
    const FusionMatrix x = fusion_features(text_probs, image_probs);
    if (labels.size() != static_cast<std::size_t>(x.rows())) {
        throw ValidationError("stacker: labels differ in length from branch predictions");
    }
    if (x.rows() == 0) throw ValidationError("stacker: no training rows");
    if (!(cfg.lambda > 0.0) || !(cfg.eta0 > 0.0) || cfg.epochs == 0) {
        throw ValidationError("stacker: lambda, eta0 and epochs must be positive");
    }
    FusionStacker s;
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto rng = CounterRng::stream(cfg.seed, "stacker", epoch);
        for (const auto i : permutation(labels.size(), rng)) {
            const double eta = cfg.eta0 / (1.0 + cfg.eta0 * cfg.lambda * static_cast<double>(t++));
            const auto row = x.row(static_cast<Eigen::Index>(i));
            for (std::size_t k = 0; k < kNumClasses; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                const double y = index_of(labels[i]) == k ? 1.0 : -1.0;
                const double margin = y * (s.weight.row(kk).dot(row) + s.bias(kk));
                s.weight.row(kk) *= 1.0 - eta * cfg.lambda;
                if (margin < 1.0) {
                    s.weight.row(kk) += eta * y * row;
                    s.bias(kk) += eta * y;
                }
            }
        }
    }
    return s;
}

Eigen::Vector3d fusion_scores(const FusionStacker& stacker, const ProbDist3& text, const ProbDist3& image) {
    Eigen::Matrix<double, kFusionFeatures, 1> x;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        x(static_cast<Eigen::Index>(c)) = text.p[c];
        x(static_cast<Eigen::Index>(kNumClasses + c)) = image.p[c];
    }
    return stacker.weight * x + stacker.bias;
}

Sentiment fusion_predict(const FusionStacker& stacker, const ProbDist3& text, const ProbDist3& image) {
    const Eigen::Vector3d s = fusion_scores(stacker, text, image);
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
        if (s(static_cast<Eigen::Index>(c)) > s(static_cast<Eigen::Index>(best))) best = c;
    }
    return static_cast<Sentiment>(best);
}

void BimodalModel::save(ByteWriter& out) const {
    text.save(out);
    image.save(out);
    stacker.save(out);
}

BimodalModel BimodalModel::load(ByteReader& in) {
    BimodalModel m;
    m.text = FfnnBowModel::load(in);
    m.image = CnnModel::load(in);
    m.stacker = FusionStacker::load(in);
    return m;
}

namespace {

template <typename T>
std::vector<T> pick(std::span<const T> items, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(items[i]);
    return out;
}

struct Branches {
    FfnnBowModel text;
    CnnModel image;
};

Branches train_branches(std::span<const std::string> captions, std::span<const HsvTensor> images,
                        std::span<const Sentiment> labels, const BimodalConfig& cfg, std::uint64_t seed) {
    nn::NetSpec spec = cfg.text_spec;
    spec.seed = seed;
    nn::TrainConfig text_train = cfg.text_train;
    text_train.seed = seed;
    nn::TrainConfig image_train = cfg.image_train;
    image_train.seed = seed;
    return {ffnn_bow_train(captions, labels, spec, text_train, cfg.prep, cfg.vocab_size),
            cnn_train(images, labels, image_train, seed)};
}

}  // namespace

BimodalModel bimodal_train(std::span<const std::string> captions, std::span<const HsvTensor> images,
                           std::span<const Sentiment> labels, const BimodalConfig& cfg) {
    const std::size_t n = labels.size();
    if (captions.size() != n || images.size() != n) {
        throw ValidationError("bimodal: captions, images and labels must be aligned");
    }
    if (cfg.out_of_fold && (cfg.folds < 2 || cfg.folds > n)) {
        throw ValidationError("bimodal: fold count must lie in [2, number of examples]");
    }

    std::vector<ProbDist3> text_probs(n), image_probs(n);
    if (cfg.out_of_fold) {
        auto rng = CounterRng::stream(cfg.seed, "fold");
        const auto order = permutation(n, rng);
        for (std::size_t f = 0; f < cfg.folds; ++f) {
            std::vector<std::size_t> fit, held;
            for (std::size_t k = 0; k < n; ++k) (k % cfg.folds == f ? held : fit).push_back(order[k]);
            std::sort(fit.begin(), fit.end());
            std::sort(held.begin(), held.end());
            const auto fit_captions = pick(captions, fit);
            const auto fit_images = pick(images, fit);
            const auto fit_labels = pick(labels, fit);
            const auto branches = train_branches(fit_captions, fit_images, fit_labels, cfg,
                                                 CounterRng::stream(cfg.seed, "fold_model", f).key());
            const auto held_captions = pick(captions, held);
            const auto held_images = pick(images, held);
            const auto tp = ffnn_bow_predict(branches.text, held_captions);
            const auto ip = cnn_predict(branches.image, held_images);
            for (std::size_t k = 0; k < held.size(); ++k) {
                text_probs[held[k]] = tp[k];
                image_probs[held[k]] = ip[k];
            }
        }
    }

    auto full = train_branches(captions, images, labels, cfg, cfg.seed);
    if (!cfg.out_of_fold) {
        text_probs = ffnn_bow_predict(full.text, captions);
        image_probs = cnn_predict(full.image, images);
    }
    StackerConfig stacker_cfg = cfg.stacker;
    stacker_cfg.seed = cfg.seed;
    return BimodalModel{std::move(full.text), std::move(full.image),
                        fusion_train(text_probs, image_probs, labels, stacker_cfg)};
}

std::vector<BimodalPrediction> bimodal_predict(const BimodalModel& model, std::span<const std::string> captions,
                                               std::span<const HsvTensor> images) {
    if (captions.size() != images.size()) throw ValidationError("bimodal: captions and images must be aligned");
    const auto tp = ffnn_bow_predict(model.text, captions);
    const auto ip = cnn_predict(model.image, images);
    std::vector<BimodalPrediction> out;
    out.reserve(tp.size());
    for (std::size_t i = 0; i < tp.size(); ++i) out.push_back({fusion_predict(model.stacker, tp[i], ip[i]), tp[i], ip[i]});
    return out;
}

}  // namespace memesent
