// memesent: prepare, train, predict, eval, stability and compare.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration or input error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "memesent/binary_io.hpp"
#include "memesent/compare.hpp"
#include "memesent/corpus.hpp"
#include "memesent/csv.hpp"
#include "memesent/embeddings.hpp"
#include "memesent/errors.hpp"
#include "memesent/metrics.hpp"
#include "memesent/pipeline.hpp"
#include "memesent/rng.hpp"
#include "memesent/stability.hpp"
#include "memesent/textprep.hpp"

namespace fs = std::filesystem;
using namespace memesent;
using nlohmann::json;

namespace {

struct DatasetOpts {
    std::string path;
    std::string schema = "canonical";
    std::string id_column, caption_column, label_column, image_column;
    std::string image_root;

    Schema resolve() const {
        Schema s;
        if (schema == "memotion") {
            s = Schema::memotion();
        } else if (schema != "canonical") {
            throw ValidationError("unknown schema '" + schema + "' (expected canonical|memotion)");
        }
        if (!id_column.empty()) s.id_column = id_column;
        if (!caption_column.empty()) s.caption_column = caption_column;
        if (!label_column.empty()) s.label_column = label_column;
        if (!image_column.empty()) s.image_column = image_column;
        return s;
    }

    Dataset load(bool labels_optional = false) const {
        if (path.empty()) throw ValidationError("--dataset is required");
        Schema s = resolve();
        if (labels_optional) {
            const auto text = read_text_file(path);
            const auto header = parse_csv(text.substr(0, text.find('\n'))).header;
            if (std::find(header.begin(), header.end(), s.label_column) == header.end()) s.label_column.clear();
        }
        return load_dataset(path, s);
    }

    fs::path images() const { return image_root.empty() ? fs::path(path).parent_path() : fs::path(image_root); }
};

struct EmbeddingOpts {
    std::string path;
    std::string format = "binary";
    std::string utf8 = "reject";

    std::optional<EmbeddingTable> load(const std::unordered_set<std::string>& vocab) const {
        if (path.empty()) return std::nullopt;
        EmbeddingLoadOptions opts;
        if (utf8 == "replace") {
            opts.utf8 = Utf8Policy::Replace;
        } else if (utf8 != "reject") {
            throw ValidationError("--embedding-utf8 must be reject or replace");
        }
        opts.vocabulary = vocab;
        auto t = load_embeddings(path, parse_embedding_format(format), opts);
        std::cerr << "embeddings: " << t.size() << " of " << vocab.size() << " corpus words found, dim " << t.dim()
                  << "\n";
        return t;
    }
};

struct ModelOpts {
    std::string model = "ffnn_w2v";
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden = {256, 128, 64, 64, 32, 16};
    std::size_t epochs = 10;
    std::size_t batch_size = 50;
    double lr = 1e-3;
    double init_sigma = 1.0;
    std::string init_mode = "normal";
    std::size_t image_epochs = 10;
    std::size_t image_batch_size = 50;
    double image_lr = 1e-3;
    double alpha = 1.0;
    std::size_t vocab_size = kDefaultBowSize;
    std::size_t folds = 5;
    bool in_sample_stacker = false;
    std::size_t stacker_epochs = 200;
    double stacker_lambda = 1e-3;
    bool upsample = false;
    bool keep_stopwords = false;
    bool no_lemmatize = false;
    bool verb_lemmas = false;
    bool strip_digits = false;
    std::string stopwords;

    PipelineConfig resolve() const {
        PipelineConfig c;
        c.kind = parse_model_kind(model);
        c.prep = PrepConfig::defaults();
        if (!stopwords.empty()) {
            const auto words = load_word_list(stopwords);
            c.prep.stopwords = {words.begin(), words.end()};
        }
        c.prep.remove_stopwords = !keep_stopwords;
        c.prep.lemmatize = !no_lemmatize;
        c.prep.verb_lemma_rules = verb_lemmas;
        c.prep.strip_digits = strip_digits;
        c.net.hidden = hidden;
        c.net.init_sigma = init_sigma;
        if (init_mode == "fanin") {
            c.net.init_mode = nn::InitMode::FanIn;
        } else if (init_mode != "normal") {
            throw ValidationError("--init-mode must be normal or fanin");
        }
        c.train.epochs = epochs;
        c.train.batch_size = batch_size;
        c.train.lr = lr;
        c.image_train.epochs = image_epochs;
        c.image_train.batch_size = image_batch_size;
        c.image_train.lr = image_lr;
        c.nb_alpha = alpha;
        c.vocab_size = vocab_size;
        c.folds = folds;
        c.out_of_fold = !in_sample_stacker;
        c.stacker.epochs = stacker_epochs;
        c.stacker.lambda = stacker_lambda;
        c.upsample = upsample;
        c.train.validate();
        c.image_train.validate();
        c.net.validate();
        return c.with_seed(seed);
    }
};

void add_dataset_opts(CLI::App* sub, DatasetOpts& d, bool required = true) {
    auto* o = sub->add_option("--dataset", d.path, "Input CSV");
    if (required) o->required();
    sub->add_option("--schema", d.schema, "Column layout: canonical | memotion")->capture_default_str();
    sub->add_option("--id-column", d.id_column, "Override the id column name");
    sub->add_option("--caption-column", d.caption_column, "Override the caption column name");
    sub->add_option("--label-column", d.label_column, "Override the label column name");
    sub->add_option("--image-column", d.image_column, "Override the image column name");
    sub->add_option("--image-root", d.image_root, "Directory for relative image paths (default: dataset directory)");
}

void add_embedding_opts(CLI::App* sub, EmbeddingOpts& e) {
    sub->add_option("--embeddings", e.path, "Word2Vec file");
    sub->add_option("--embedding-format", e.format, "binary | text")->capture_default_str();
    sub->add_option("--embedding-utf8", e.utf8, "reject | replace invalid token bytes")->capture_default_str();
}

void add_model_opts(CLI::App* sub, ModelOpts& m) {
    sub->add_option("--model", m.model, "nb | ffnn_w2v | ffnn_bow | cnn_hsv | fusion")->capture_default_str();
    sub->add_option("--seed", m.seed, "Top-level seed")->capture_default_str();
    sub->add_option("--hidden", m.hidden, "Hidden layer widths")->delimiter(',')->capture_default_str();
    sub->add_option("--epochs", m.epochs)->capture_default_str();
    sub->add_option("--batch-size", m.batch_size)->capture_default_str();
    sub->add_option("--lr", m.lr, "Adam learning rate")->capture_default_str();
    sub->add_option("--init-sigma", m.init_sigma)->capture_default_str();
    sub->add_option("--init-mode", m.init_mode, "normal | fanin")->capture_default_str();
    sub->add_option("--image-epochs", m.image_epochs)->capture_default_str();
    sub->add_option("--image-batch-size", m.image_batch_size)->capture_default_str();
    sub->add_option("--image-lr", m.image_lr)->capture_default_str();
    sub->add_option("--alpha", m.alpha, "Naive Bayes smoothing")->capture_default_str();
    sub->add_option("--vocab-size", m.vocab_size, "Bag-of-words vocabulary size")->capture_default_str();
    sub->add_option("--folds", m.folds, "Out-of-fold folds for the stacker")->capture_default_str();
    sub->add_flag("--in-sample-stacker", m.in_sample_stacker, "Train the stacker on in-sample branch outputs");
    sub->add_option("--stacker-epochs", m.stacker_epochs)->capture_default_str();
    sub->add_option("--stacker-lambda", m.stacker_lambda)->capture_default_str();
    sub->add_flag("--upsample", m.upsample, "Oversample minority classes of the training data");
    sub->add_flag("--keep-stopwords", m.keep_stopwords);
    sub->add_flag("--no-lemmatize", m.no_lemmatize);
    sub->add_flag("--verb-lemmas", m.verb_lemmas, "Also strip -ing / -ed");
    sub->add_flag("--strip-digits", m.strip_digits);
    sub->add_option("--stopwords", m.stopwords, "Stopword list file (default: bundled list)");
}

fs::path prepare_out(const std::string& out) {
    if (out.empty()) throw ValidationError("--out is required");
    fs::create_directories(out);
    return out;
}

/// key=[a, b] and key="[a,b]" both become key=[a,b].
std::string canonical_config_line(const std::string& line) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) return line;
    std::string value = line.substr(eq + 1);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"' && value[1] == '[') {
        value = value.substr(1, value.size() - 2);
    }
    if (value.empty() || value.front() != '[') return line;
    std::erase(value, ' ');
    return line.substr(0, eq + 1) + value;
}

/// Writes the resolved subcommand configuration; returns its hash.
std::string persist_config(const CLI::App* sub, const fs::path& out) {
    std::string text = "[" + sub->get_name() + "]\n";
    std::istringstream in(sub->config_to_str(true, false));
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("out=", 0) == 0 || line.rfind("config=", 0) == 0) continue;
        text += canonical_config_line(line) + "\n";
    }
    write_text_file(out / "config.ini", text);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return hex;
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_predictions(const Dataset& ds, const std::vector<ProbDist3>& probs) {
    std::string out = csv_row({"id", "label", "p_neg", "p_neu", "p_pos"});
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& p = probs[i];
        out += csv_row({ds[i].id, std::string(to_string(p.argmax())), fmt(p.p[0]), fmt(p.p[1]), fmt(p.p[2])});
    }
    return out;
}

struct PredictionRow {
    std::string id;
    Sentiment label;
};

std::vector<PredictionRow> load_predictions(const fs::path& path) {
    if (!fs::exists(path)) throw ValidationError("predictions file not found: " + path.string());
    const auto table = parse_csv(read_text_file(path));
    const auto id_col = table.column("id");
    const auto label_col = table.column("label");
    if (!id_col || !label_col) throw ValidationError(path.string() + ": predictions need id and label columns");
    std::vector<PredictionRow> rows;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        rows.push_back({table.rows[i][*id_col], normalize_label(table.rows[i][*label_col])});
    }
    if (rows.empty()) throw ValidationError(path.string() + ": no predictions");
    return rows;
}

/// Loads what the model kind needs for these records.
struct LoadedResources {
    std::optional<EmbeddingTable> table;
    std::optional<ImageStore> images;
    Resources res;
};

void load_resources(LoadedResources& lr, ModelKind kind, const PrepConfig& prep, const EmbeddingOpts& emb,
                    const DatasetOpts& data, std::initializer_list<const Dataset*> corpora) {
    if (needs_embeddings(kind)) {
        if (emb.path.empty()) throw ValidationError("model " + std::string(to_string(kind)) + " requires --embeddings");
        std::unordered_set<std::string> vocab;
        for (const auto* ds : corpora) vocab.merge(corpus_vocabulary(*ds, prep));
        lr.table = emb.load(vocab);
        lr.res.embeddings = &*lr.table;
    }
    if (needs_images(kind)) {
        lr.images.emplace(data.images());
        lr.res.images = &*lr.images;
    }
}

json train_summary_json(const TrainSummary& s) {
    json j = {{"examples", s.examples}, {"epoch_losses", s.epoch_losses}};
    if (s.all_oov_fraction) j["all_oov_fraction"] = *s.all_oov_fraction;
    return j;
}

// ---------------------------------------------------------------- prepare

struct PrepareCmd {
    DatasetOpts data;
    std::string out;
};

std::string length_bin(std::size_t n) {
    if (n == 0) return "0";
    if (n <= 5) return "1-5";
    if (n <= 10) return "6-10";
    if (n <= 20) return "11-20";
    if (n <= 50) return "21-50";
    return "51+";
}

int run_prepare(const PrepareCmd& c, const CLI::App* sub) {
    const auto out = prepare_out(c.out);
    const auto ds = c.data.load();
    if (ds.empty()) throw DatasetError(c.data.path + ": no records");
    persist_config(sub, out);
    write_dataset(ds, out / "dataset.csv");

    const std::vector<std::string> bins = {"0", "1-5", "6-10", "11-20", "21-50", "51+"};
    std::map<std::string, std::size_t> hist;
    for (const auto& b : bins) hist[b] = 0;
    const auto prep = PrepConfig::defaults();
    for (const auto& r : ds) ++hist[length_bin(preprocess(r.caption, prep).size())];

    json j = {{"records", ds.size()}};
    json h = json::array();
    for (const auto& b : bins) h.push_back({{"tokens", b}, {"captions", hist[b]}});
    j["caption_length_histogram"] = h;
    std::ostringstream txt;
    txt << "records: " << ds.size() << "\n";
    if (ds.all_labeled()) {
        const auto st = class_stats(ds);
        j["classes"] = to_json(st);
        char line[96];
        for (const auto s : kAllSentiments) {
            std::snprintf(line, sizeof line, "%-9s %6zu  %5.1f%%\n", std::string(to_string(s)).c_str(), st.count(s),
                          100.0 * st.fraction(s));
            txt << line;
        }
    } else {
        txt << "labels: incomplete, class statistics skipped\n";
    }
    txt << "caption length (tokens after preprocessing):\n";
    for (const auto& b : bins) txt << "  " << b << ": " << hist[b] << "\n";
    write_json(out / "stats.json", j);
    write_text_file(out / "stats.txt", txt.str());
    std::cout << txt.str();
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainCmd {
    DatasetOpts data;
    EmbeddingOpts emb;
    ModelOpts model;
    std::string out;
    double split = 0.0;
};

int run_train(const TrainCmd& c, const CLI::App* sub) {
    const auto cfg = c.model.resolve();
    const auto out = prepare_out(c.out);
    const auto full = c.data.load();
    if (full.empty()) throw DatasetError(c.data.path + ": no records");
    const auto hash = persist_config(sub, out);

    Dataset train = full, val;
    const bool holdout = c.split > 0.0;
    if (holdout) std::tie(train, val) = stratified_split(full, c.split, cfg.seed);

    LoadedResources lr;
    load_resources(lr, cfg.kind, cfg.prep, c.emb, c.data, {&full});
    TrainSummary summary;
    const auto model = train_model(train, cfg, lr.res, &summary);
    save_model(model, out / "model.bin");

    json report = {{"model", to_string(cfg.kind)}, {"seed", cfg.seed}, {"config_hash", hash},
                   {"train", train_summary_json(summary)}};
    std::cout << "trained " << to_string(cfg.kind) << " on " << summary.examples << " examples\n";
    for (std::size_t e = 0; e < summary.epoch_losses.size(); ++e) {
        std::cout << "  epoch " << e + 1 << " loss " << summary.epoch_losses[e] << "\n";
    }
    if (holdout) {
        const auto probs = predict_model(model, val, lr.res);
        write_text_file(out / "validation_predictions.csv", format_predictions(val, probs));
        auto ev = macro_f1(argmax_all(probs), val.labels());
        ev.meta = {std::string(to_string(cfg.kind)), std::string(modality_of(cfg.kind)), cfg.seed, hash, ""};
        write_json(out / "eval_report.json", to_json(ev));
        write_text_file(out / "eval_report.txt", format_text(ev));
        report["validation"] = {{"examples", val.size()}, {"macro_f1", ev.macro_f1}};
        std::cout << "validation macro-F1 " << ev.macro_f1 << "\n";
    }
    write_json(out / "train_report.json", report);
    return 0;
}

// ---------------------------------------------------------------- predict

struct PredictCmd {
    DatasetOpts data;
    EmbeddingOpts emb;
    std::string model_file;
    std::string out;
};

int run_predict(const PredictCmd& c, const CLI::App* sub) {
    const auto model = load_model(c.model_file);
    const auto out = prepare_out(c.out);
    const auto ds = c.data.load(true);
    persist_config(sub, out);
    const auto kind = kind_of(model);
    const PrepConfig prep = std::holds_alternative<FfnnW2vModel>(model) ? std::get<FfnnW2vModel>(model).prep
                                                                         : PrepConfig::defaults();
    LoadedResources lr;
    load_resources(lr, kind, prep, c.emb, c.data, {&ds});
    const auto probs = predict_model(model, ds, lr.res);
    write_text_file(out / "predictions.csv", format_predictions(ds, probs));
    std::cout << "wrote " << ds.size() << " predictions\n";
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalCmd {
    DatasetOpts gold;
    std::string predictions;
    std::string out;
    std::string model_name = "model";
    std::string modality = "text";
    std::string baseline_train;
};

int run_eval(const EvalCmd& c, const CLI::App* sub) {
    const auto out = prepare_out(c.out);
    const auto preds = load_predictions(c.predictions);
    const auto gold = c.gold.load();
    const auto hash = persist_config(sub, out);
    std::unordered_map<std::string, Sentiment> gold_by_id;
    for (const auto& r : gold) {
        if (!r.label) throw ValidationError("gold record '" + r.id + "' has no label");
        gold_by_id.emplace(r.id, *r.label);
    }
    std::vector<Sentiment> p, g;
    for (const auto& row : preds) {
        const auto it = gold_by_id.find(row.id);
        if (it == gold_by_id.end()) throw ValidationError("prediction for unknown id '" + row.id + "'");
        p.push_back(row.label);
        g.push_back(it->second);
    }
    if (p.size() != gold_by_id.size()) {
        throw ValidationError(std::to_string(gold_by_id.size() - p.size()) + " gold records have no prediction");
    }
    auto ev = macro_f1(p, g);
    ev.meta = {c.model_name, c.modality, 0, hash, ""};
    write_json(out / "eval_report.json", to_json(ev));
    write_text_file(out / "eval_report.txt", format_text(ev));
    std::cout << format_text(ev);
    if (!c.baseline_train.empty()) {
        DatasetOpts bt = c.gold;
        bt.path = c.baseline_train;
        auto base = majority_baseline(bt.load().labels(), g);
        base.meta = {"majority", "-", 0, hash, ""};
        write_json(out / "baseline_report.json", to_json(base));
        write_text_file(out / "baseline_report.txt", format_text(base));
        std::cout << "majority baseline macro-F1 " << base.macro_f1 << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- stability

struct StabilityCmd {
    DatasetOpts data;
    EmbeddingOpts emb;
    ModelOpts model;
    std::string out;
    std::size_t runs = 50;
    double split = 0.8;
    unsigned threads = 1;
    bool fixed_split = false;
};

int run_stability(const StabilityCmd& c, const CLI::App* sub) {
    const auto cfg = c.model.resolve();
    if (c.runs < 2) throw ValidationError("--runs must be at least 2");
    const auto out = prepare_out(c.out);
    const auto ds = c.data.load();
    const auto hash = persist_config(sub, out);
    LoadedResources lr;
    load_resources(lr, cfg.kind, cfg.prep, c.emb, c.data, {&ds});

    StudyConfig sc;
    sc.train_fraction = c.split;
    sc.seed0 = cfg.seed;
    sc.resplit = !c.fixed_split;
    sc.threads = c.threads;
    auto fn = [&](const Dataset& train, const Dataset& val, std::uint64_t seed) {
        Resources res = lr.res;
        const auto model = train_model(train, cfg.with_seed(seed), res);
        return argmax_all(predict_model(model, val, res));
    };
    const auto rep = stability_study(fn, ds, sc, c.runs);
    auto j = to_json(rep);
    j["model"] = to_string(cfg.kind);
    j["modality"] = modality_of(cfg.kind);
    j["config_hash"] = hash;
    write_json(out / "stability.json", j);
    write_text_file(out / "stability.txt", format_text(rep));
    write_text_file(out / "runs.csv", format_runs_csv(rep));
    std::cout << format_text(rep);
    return 0;
}

// ---------------------------------------------------------------- compare

struct CompareCmd {
    std::vector<std::string> reports;
    std::vector<std::string> entries;
    std::string out;
};

CompareEntry entry_from_report(const fs::path& path) {
    const auto j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError(path.string() + ": not a JSON report");
    if (j.contains("macro_f1")) {
        const auto ev = eval_report_from_json(j);
        return {ev.meta.model, ev.meta.modality, ev.macro_f1};
    }
    if (j.contains("mean") && j.contains("model")) {
        return {j.at("model").get<std::string>(), j.value("modality", std::string("-")), j.at("mean").get<double>()};
    }
    throw ValidationError(path.string() + ": neither an evaluation nor a stability report");
}

CompareEntry entry_from_text(const std::string& spec) {
    const auto table = parse_csv("model,modality,score\n" + spec + "\n");
    if (table.rows.size() != 1) throw ValidationError("--entry expects model,modality,score");
    const auto& r = table.rows[0];
    double score = 0;
    try {
        std::size_t used = 0;
        score = std::stod(r[2], &used);
        if (used != r[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ValidationError("--entry score is not a number: '" + r[2] + "'");
    }
    return {r[0], r[1], score};
}

int run_compare(const CompareCmd& c, const CLI::App* sub) {
    std::vector<CompareEntry> entries;
    for (const auto& r : c.reports) entries.push_back(entry_from_report(r));
    for (const auto& e : c.entries) entries.push_back(entry_from_text(e));
    const auto table = compare_report(std::move(entries));
    if (!c.out.empty()) {
        const auto out = prepare_out(c.out);
        persist_config(sub, out);
        write_json(out / "comparison.json", to_json(table));
        write_text_file(out / "comparison.txt", format_text(table));
    }
    std::cout << format_text(table);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meme sentiment classification toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file; [<command>] sections hold option values");

    PrepareCmd prepare;
    auto* s_prepare = app.add_subcommand("prepare", "Load, normalise and summarise a dataset");
    add_dataset_opts(s_prepare, prepare.data);
    s_prepare->add_option("--out", prepare.out, "Output directory")->required();

    TrainCmd train;
    auto* s_train = app.add_subcommand("train", "Train a classifier");
    add_dataset_opts(s_train, train.data);
    add_embedding_opts(s_train, train.emb);
    add_model_opts(s_train, train.model);
    s_train->add_option("--split", train.split, "Train fraction of a stratified validation holdout (0: none)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s_train->add_option("--out", train.out, "Output directory")->required();

    PredictCmd predict;
    auto* s_predict = app.add_subcommand("predict", "Predict labels for a CSV");
    s_predict->add_option("--model-file", predict.model_file, "Trained model")->required();
    add_dataset_opts(s_predict, predict.data);
    add_embedding_opts(s_predict, predict.emb);
    s_predict->add_option("--out", predict.out, "Output directory")->required();

    EvalCmd eval;
    auto* s_eval = app.add_subcommand("eval", "Score predictions against gold labels");
    s_eval->add_option("--predictions", eval.predictions, "Predictions CSV")->required();
    add_dataset_opts(s_eval, eval.gold);
    s_eval->add_option("--model-name", eval.model_name)->capture_default_str();
    s_eval->add_option("--modality", eval.modality)->capture_default_str();
    s_eval->add_option("--baseline-train", eval.baseline_train, "Training CSV for a majority-class baseline");
    s_eval->add_option("--out", eval.out, "Output directory")->required();

    StabilityCmd stab;
    auto* s_stab = app.add_subcommand("stability", "Repeated seeded train/validate runs");
    add_dataset_opts(s_stab, stab.data);
    add_embedding_opts(s_stab, stab.emb);
    add_model_opts(s_stab, stab.model);
    s_stab->add_option("--runs", stab.runs)->capture_default_str();
    s_stab->add_option("--split", stab.split, "Train fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    s_stab->add_option("--threads", stab.threads)->capture_default_str();
    s_stab->add_flag("--fixed-split", stab.fixed_split, "Share one split across runs");
    s_stab->add_option("--out", stab.out, "Output directory")->required();

    CompareCmd cmp;
    auto* s_cmp = app.add_subcommand("compare", "Rank evaluation and stability reports");
    s_cmp->add_option("reports", cmp.reports, "eval_report.json or stability.json files");
    s_cmp->add_option("--entry", cmp.entries, "Extra row: model,modality,score");
    s_cmp->add_option("--out", cmp.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*s_prepare) return run_prepare(prepare, s_prepare);
        if (*s_train) return run_train(train, s_train);
        if (*s_predict) return run_predict(predict, s_predict);
        if (*s_eval) return run_eval(eval, s_eval);
        if (*s_stab) return run_stability(stab, s_stab);
        if (*s_cmp) return run_compare(cmp, s_cmp);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
