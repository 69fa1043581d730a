#include "memesent/pipeline.hpp"

#include <cmath>

#include "memesent/errors.hpp"
#include "memesent/hsv.hpp"

namespace memesent {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 5> kKindNames = {{
    {ModelKind::NaiveBayes, "nb"},
    {ModelKind::FfnnW2v, "ffnn_w2v"},
    {ModelKind::FfnnBow, "ffnn_bow"},
    {ModelKind::CnnHsv, "cnn_hsv"},
    {ModelKind::Fusion, "fusion"},
}};

template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};

const EmbeddingTable& require_embeddings(const Resources& res) {
    if (!res.embeddings) throw ValidationError("this model needs an embedding table (--embeddings)");
    return *res.embeddings;
}

ImageStore& require_images(Resources& res) {
    if (!res.images) throw ValidationError("this model needs image inputs");
    return *res.images;
}

ProbDist3 softmax3(const Eigen::Vector3d& s) {
    const double m = s.maxCoeff();
    ProbDist3 d;
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) sum += d.p[c] = std::exp(s(static_cast<Eigen::Index>(c)) - m);
    for (auto& v : d.p) v /= sum;
    return d;
}

}  // namespace

ModelKind parse_model_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    throw ValidationError("unknown model '" + std::string(name) + "' (expected nb|ffnn_w2v|ffnn_bow|cnn_hsv|fusion)");
}

std::string_view to_string(ModelKind kind) noexcept {
    for (const auto& [k, n] : kKindNames) {
        if (k == kind) return n;
    }
    return "?";
}

std::string_view modality_of(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::CnnHsv: return "image";
        case ModelKind::Fusion: return "text-image";
        default: return "text";
    }
}

bool needs_embeddings(ModelKind kind) noexcept { return kind == ModelKind::FfnnW2v; }
bool needs_images(ModelKind kind) noexcept { return kind == ModelKind::CnnHsv || kind == ModelKind::Fusion; }

PipelineConfig PipelineConfig::with_seed(std::uint64_t s) const {
    PipelineConfig c = *this;
    c.seed = s;
    c.net.seed = s;
    c.train.seed = s;
    c.image_train.seed = s;
    c.stacker.seed = s;
    return c;
}

std::vector<HsvTensor> ImageStore::load(const Dataset& ds) {
    std::vector<HsvTensor> out;
    out.reserve(ds.size());
    for (const auto& r : ds) {
        if (!r.image_path || r.image_path->empty()) {
            throw ValidationError("record '" + r.id + "' has no image path");
        }
        std::filesystem::path p(*r.image_path);
        if (p.is_relative()) p = root_ / p;
        {
            std::lock_guard lock(mu_);
            if (const auto it = cache_.find(p); it != cache_.end()) {
                out.push_back(it->second);
                continue;
            }
        }
        auto t = load_hsv_input(p);
        std::lock_guard lock(mu_);
        out.push_back(cache_.emplace(p, std::move(t)).first->second);
    }
    return out;
}

void NbTextModel::save(ByteWriter& out) const {
    save_prep(out, prep);
    nb.save(out);
}

NbTextModel NbTextModel::load(ByteReader& in) {
    NbTextModel m;
    m.prep = load_prep(in);
    m.nb = NbModel::load(in);
    return m;
}

ModelKind kind_of(const AnyModel& model) noexcept {
    return std::visit(Overloaded{[](const NbTextModel&) { return ModelKind::NaiveBayes; },
                                 [](const FfnnW2vModel&) { return ModelKind::FfnnW2v; },
                                 [](const FfnnBowModel&) { return ModelKind::FfnnBow; },
                                 [](const CnnModel&) { return ModelKind::CnnHsv; },
                                 [](const BimodalModel&) { return ModelKind::Fusion; }},
                      model);
}

AnyModel train_model(const Dataset& input, const PipelineConfig& cfg, Resources& res, TrainSummary* summary) {
    const Dataset train = cfg.upsample ? upsample(input, cfg.seed) : input;
    const auto captions = train.captions();
    const auto labels = train.labels();
    TrainSummary local;
    local.examples = train.size();

    AnyModel model;
    switch (cfg.kind) {
        case ModelKind::NaiveBayes:
            model = NbTextModel{cfg.prep, nb_train(preprocess_all(captions, cfg.prep), labels, cfg.nb_alpha)};
            break;
        case ModelKind::FfnnW2v: {
            FfnnTrainInfo info;
            model = ffnn_w2v_train(captions, labels, require_embeddings(res), cfg.net, cfg.train, cfg.prep, &info);
            local.epoch_losses = info.epoch_losses;
            local.all_oov_fraction = info.all_oov_fraction;
            break;
        }
        case ModelKind::FfnnBow: {
            FfnnTrainInfo info;
            model = ffnn_bow_train(captions, labels, cfg.net, cfg.train, cfg.prep, cfg.vocab_size, &info);
            local.epoch_losses = info.epoch_losses;
            break;
        }
        case ModelKind::CnnHsv: {
            CnnTrainInfo info;
            const auto images = require_images(res).load(train);
            model = cnn_train(images, labels, cfg.image_train, cfg.seed, &info);
            local.epoch_losses = info.epoch_losses;
            break;
        }
        case ModelKind::Fusion: {
            const auto images = require_images(res).load(train);
            BimodalConfig bc;
            bc.text_spec = cfg.net;
            bc.text_train = cfg.train;
            bc.image_train = cfg.image_train;
            bc.prep = cfg.prep;
            bc.vocab_size = cfg.vocab_size;
            bc.folds = cfg.folds;
            bc.out_of_fold = cfg.out_of_fold;
            bc.stacker = cfg.stacker;
            bc.seed = cfg.seed;
            model = bimodal_train(captions, images, labels, bc);
            break;
        }
    }
    if (summary) *summary = std::move(local);
    return model;
}

std::vector<ProbDist3> predict_model(const AnyModel& model, const Dataset& ds, Resources& res) {
    const auto captions = ds.captions();
    return std::visit(
        Overloaded{
            [&](const NbTextModel& m) {
                std::vector<ProbDist3> out;
                for (const auto& c : captions) out.push_back(nb_predict(m.nb, preprocess(c, m.prep)));
                return out;
            },
            [&](const FfnnW2vModel& m) {
                std::vector<ProbDist3> out;
                for (const auto& p : ffnn_w2v_predict(m, captions, require_embeddings(res))) out.push_back(p.probs);
                return out;
            },
            [&](const FfnnBowModel& m) { return ffnn_bow_predict(m, captions); },
            [&](const CnnModel& m) { return cnn_predict(m, require_images(res).load(ds)); },
            [&](const BimodalModel& m) {
                const auto images = require_images(res).load(ds);
                std::vector<ProbDist3> out;
                for (const auto& p : bimodal_predict(m, captions, images)) {
                    out.push_back(softmax3(fusion_scores(m.stacker, p.text, p.image)));
                }
                return out;
            },
        },
        model);
}

std::vector<Sentiment> argmax_all(const std::vector<ProbDist3>& probs) {
    std::vector<Sentiment> out;
    out.reserve(probs.size());
    for (const auto& p : probs) out.push_back(p.argmax());
    return out;
}

std::vector<std::uint8_t> encode_model(const AnyModel& model) {
    ByteWriter w;
    std::visit([&](const auto& m) { m.save(w); }, model);
    return encode_blob({std::string(to_string(kind_of(model))), 1, w.take()});
}

AnyModel decode_model(std::span<const std::uint8_t> bytes) {
    const auto blob = decode_blob(bytes);
    if (blob.version != 1) throw FormatError("unsupported model version " + std::to_string(blob.version));
    ModelKind kind;
    try {
        kind = parse_model_kind(blob.kind);
    } catch (const ValidationError&) {
        throw FormatError("unknown model kind '" + blob.kind + "' in model file");
    }
    ByteReader r(blob.payload);
    AnyModel model;
    switch (kind) {
        case ModelKind::NaiveBayes: model = NbTextModel::load(r); break;
        case ModelKind::FfnnW2v: model = FfnnW2vModel::load(r); break;
        case ModelKind::FfnnBow: model = FfnnBowModel::load(r); break;
        case ModelKind::CnnHsv: model = CnnModel::load(r); break;
        case ModelKind::Fusion: model = BimodalModel::load(r); break;
    }
    r.expect_end();
    return model;
}

void save_model(const AnyModel& model, const std::filesystem::path& path) { write_file_bytes(path, encode_model(model)); }

AnyModel load_model(const std::filesystem::path& path) {
    try {
        return decode_model(read_file_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::unordered_set<std::string> corpus_vocabulary(const Dataset& ds, const PrepConfig& prep) {
    std::unordered_set<std::string> vocab;
    for (const auto& r : ds) {
        for (auto& t : preprocess(r.caption, prep)) vocab.insert(std::move(t));
    }
    return vocab;
}

}  // namespace memesent
