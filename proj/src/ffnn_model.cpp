#include "memesent/ffnn_model.hpp"

namespace memesent {

namespace {

constexpr std::uint32_t kNetFormat = 1;

void read_matrix(ByteReader& in, Eigen::Ref<Eigen::MatrixXd> m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = in.f64();
    }
}

void write_matrix(ByteWriter& out, const Eigen::Ref<const Eigen::MatrixXd>& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) out.f64(m(r, c));
    }
}

}  // namespace

void save_net(ByteWriter& out, const nn::NetSpec& spec, const nn::MlpParams<double>& params) {
    out.u32(kNetFormat);
    out.u64(spec.input_dim);
    out.u64(spec.hidden.size());
    for (auto h : spec.hidden) out.u64(h);
    out.u64(spec.output_dim);
    out.u8(static_cast<std::uint8_t>(spec.activation));
    out.u64(spec.seed);
    out.f64(spec.init_sigma);
    out.u8(static_cast<std::uint8_t>(spec.init_mode));
    out.u64(params.layers.size());
    for (const auto& l : params.layers) {
        out.u64(l.out());
        out.u64(l.in());
        write_matrix(out, l.weight);
        write_matrix(out, l.bias);
    }
}

void load_net(ByteReader& in, nn::NetSpec& spec, nn::MlpParams<double>& params) {
    if (const auto v = in.u32(); v != kNetFormat) {
        throw FormatError("unsupported network format version " + std::to_string(v));
    }
    spec = nn::NetSpec{};
    spec.input_dim = in.u64();
    const auto depth = in.u64();
    if (depth > 1024) throw FormatError("implausible hidden depth " + std::to_string(depth));
    spec.hidden.assign(depth, 0);
    for (auto& h : spec.hidden) h = in.u64();
    spec.output_dim = in.u64();
    const auto act = in.u8();
    if (act > 1) throw FormatError("unknown activation tag " + std::to_string(act));
    spec.activation = static_cast<nn::Activation>(act);
    spec.seed = in.u64();
    spec.init_sigma = in.f64();
    const auto mode = in.u8();
    if (mode > 1) throw FormatError("unknown init mode " + std::to_string(mode));
    spec.init_mode = static_cast<nn::InitMode>(mode);

    const auto widths = spec.widths();
    const auto n_layers = in.u64();
    if (n_layers + 1 != widths.size()) throw FormatError("layer count does not match the network spec");
    params = {};
    params.activation = spec.activation;
    for (std::uint64_t l = 0; l < n_layers; ++l) {
        const auto rows = in.u64();
        const auto cols = in.u64();
        if (rows != widths[l + 1] || cols != widths[l]) {
            throw FormatError("layer " + std::to_string(l) + " shape does not match the network spec");
        }
        if (rows * cols * 8 > in.remaining()) throw FormatError("layer " + std::to_string(l) + " is truncated");
        nn::DenseLayer<double> layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
        read_matrix(in, layer.weight);
        read_matrix(in, layer.bias);
        params.layers.push_back(std::move(layer));
    }
    if (!params.all_finite()) throw FormatError("network contains non-finite weights");
}

void save_prep(ByteWriter& out, const PrepConfig& cfg) {
    out.u8(cfg.remove_stopwords);
    out.u8(cfg.lemmatize);
    out.u8(cfg.verb_lemma_rules);
    out.u8(cfg.strip_digits);
    out.u64(cfg.stopwords.size());
    for (const auto& w : cfg.stopwords) out.str(w);
}

PrepConfig load_prep(ByteReader& in) {
    PrepConfig cfg;
    cfg.remove_stopwords = in.u8() != 0;
    cfg.lemmatize = in.u8() != 0;
    cfg.verb_lemma_rules = in.u8() != 0;
    cfg.strip_digits = in.u8() != 0;
    const auto n = in.u64();
    if (n > in.remaining()) throw FormatError("stopword count exceeds payload");
    for (std::uint64_t i = 0; i < n; ++i) cfg.stopwords.insert(in.str());
    return cfg;
}

std::vector<int> class_indices(std::span<const Sentiment> labels) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (auto s : labels) out.push_back(static_cast<int>(index_of(s)));
    return out;
}

ProbDist3 to_prob(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    if (row.size() != static_cast<Eigen::Index>(kNumClasses)) {
        throw nn::ShapeError("expected a 3-class probability row");
    }
    ProbDist3 d;
    for (std::size_t c = 0; c < kNumClasses; ++c) d.p[c] = row(static_cast<Eigen::Index>(c));
    return d;
}

std::vector<TokenList> preprocess_all(std::span<const std::string> captions, const PrepConfig& cfg) {
    std::vector<TokenList> out;
    out.reserve(captions.size());
    for (const auto& c : captions) out.push_back(preprocess(c, cfg));
    return out;
}

void FfnnW2vModel::save(ByteWriter& out) const {
    save_prep(out, prep);
    out.str(embedding_source);
    save_net(out, spec, params);
}

FfnnW2vModel FfnnW2vModel::load(ByteReader& in) {
    FfnnW2vModel m;
    m.prep = load_prep(in);
    m.embedding_source = in.str();
    load_net(in, m.spec, m.params);
    return m;
}

FfnnW2vModel ffnn_w2v_train(std::span<const std::string> captions, std::span<const Sentiment> labels,
                            const EmbeddingTable& table, const nn::NetSpec& spec, const nn::TrainConfig& cfg,
                            const PrepConfig& prep, FfnnTrainInfo* info) {
    if (table.dim() != spec.input_dim) {
        throw ValidationError("embedding dimension " + std::to_string(table.dim()) +
                              " does not match network input_dim " + std::to_string(spec.input_dim));
    }
    if (captions.size() != labels.size()) throw ValidationError("captions and labels differ in length");
    const auto tokens = preprocess_all(captions, prep);
    const auto embedded = embed_corpus(tokens, table);
    const auto y = class_indices(labels);
    auto result = nn::train<double>(spec, embedded.features, y, cfg);
    if (info) {
        info->epoch_losses = result.epoch_losses;
        info->all_oov_fraction = embedded.all_oov_fraction();
    }
    return FfnnW2vModel{prep, spec, std::move(result.params), table.source};
}

std::vector<CaptionPrediction> ffnn_w2v_predict(const FfnnW2vModel& model, std::span<const std::string> captions,
                                                const EmbeddingTable& table) {
    if (table.dim() != model.spec.input_dim) {
        throw ValidationError("embedding dimension does not match the model input");
    }
    std::vector<TokenList> tokens = preprocess_all(captions, model.prep);
    Eigen::MatrixXd features(static_cast<Eigen::Index>(captions.size()), static_cast<Eigen::Index>(table.dim()));
    std::vector<CaptionPrediction> out(captions.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto e = caption_embedding(tokens[i], table);
        features.row(static_cast<Eigen::Index>(i)) = e.vector.transpose();
        out[i].all_oov = e.covered == 0;
    }
    if (captions.empty()) return out;
    const Eigen::MatrixXd probs = nn::predict_proba(model.params, features);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].probs = to_prob(probs.row(static_cast<Eigen::Index>(i)));
    return out;
}

CaptionPrediction ffnn_w2v_predict(const FfnnW2vModel& model, std::string_view caption,
                                   const EmbeddingTable& table) {
    const std::string one(caption);
    return ffnn_w2v_predict(model, std::span<const std::string>(&one, 1), table).front();
}

void FfnnBowModel::save(ByteWriter& out) const {
    save_prep(out, prep);
    vocab.save(out);
    save_net(out, spec, params);
}

FfnnBowModel FfnnBowModel::load(ByteReader& in) {
    FfnnBowModel m;
    m.prep = load_prep(in);
    m.vocab = BowVocab::load(in);
    load_net(in, m.spec, m.params);
    if (m.spec.input_dim != m.vocab.size()) throw FormatError("vocabulary size does not match network input");
    return m;
}

FfnnBowModel ffnn_bow_train(std::span<const std::string> captions, std::span<const Sentiment> labels,
                            nn::NetSpec spec, const nn::TrainConfig& cfg, const PrepConfig& prep,
                            std::size_t vocab_size, FfnnTrainInfo* info) {
    if (captions.size() != labels.size()) throw ValidationError("captions and labels differ in length");
    const auto tokens = preprocess_all(captions, prep);
    BowVocab vocab = build_bow_vocab(tokens, vocab_size);
    if (vocab.size() == 0) throw ValidationError("bag-of-words vocabulary is empty (no tokens in training captions)");
    spec.input_dim = vocab.size();
    const Eigen::MatrixXd x = bow_matrix(tokens, vocab);
    const auto y = class_indices(labels);
    auto result = nn::train<double>(spec, x, y, cfg);
    if (info) info->epoch_losses = result.epoch_losses;
    return FfnnBowModel{prep, std::move(vocab), spec, std::move(result.params)};
}

std::vector<ProbDist3> ffnn_bow_predict(const FfnnBowModel& model, std::span<const std::string> captions) {
    std::vector<ProbDist3> out;
    if (captions.empty()) return out;
    const auto tokens = preprocess_all(captions, model.prep);
    const Eigen::MatrixXd probs = nn::predict_proba(model.params, bow_matrix(tokens, model.vocab));
    out.reserve(captions.size());
    for (Eigen::Index i = 0; i < probs.rows(); ++i) out.push_back(to_prob(probs.row(i)));
    return out;
}

}  // namespace memesent
