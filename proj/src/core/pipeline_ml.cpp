#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "csvio.hpp"
#include "errors.hpp"
#include "labels.hpp"
#include "functionals.hpp"
#include "mlp.hpp"
#include "pipeline.hpp"
#include "pipeline_detail.hpp"
#include "reportgen.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace fs = std::filesystem;

namespace affectfuse::pipeline {

using detail::parse_arch;
using detail::parse_label_type;
using detail::parse_speaking;
using detail::read_json_file;
using detail::require_string;
using detail::write_json_file;

// ---- sync --------------------------------------------------------------------

namespace {

struct EmbeddingFile {
    Dataset embeddings;                      // n x 1024
    std::vector<std::int64_t> segment_index; // per row
    std::vector<int> valence, arousal, dominance;
};

EmbeddingFile load_embeddings(const std::string& path, int expected_dim) {
    CsvTable t = read_csv(path);
    std::vector<std::string> expected = {"subject_id", "segment_index", "valence", "arousal",
                                         "dominance"};
    for (int j = 0; j < expected_dim; ++j) expected.push_back("e_" + std::to_string(j));
    t.require_header(expected);
    EmbeddingFile out;
    out.embeddings.dim = static_cast<std::size_t>(expected_dim);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out.segment_index.push_back(t.cell_int(i, 1));
        const int v = labels::index_of(labels::kValence, t.cell(i, 2));
        const int a = labels::index_of(labels::kArousal, t.cell(i, 3));
        const int d = labels::index_of(labels::kDominance, t.cell(i, 4));
        if (v < 0 || a < 0 || d < 0)
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[i]) +
                                  ": unknown VAD label");
        out.valence.push_back(v);
        out.arousal.push_back(a);
        out.dominance.push_back(d);
        for (int j = 0; j < expected_dim; ++j)
            out.embeddings.x.push_back(t.cell_double(i, 5 + static_cast<std::size_t>(j)));
        ++out.embeddings.n;
    }
    return out;
}

std::map<std::int64_t, std::vector<double>> load_face_file(const std::string& path, int expected_dim) {
    CsvTable t = read_csv(path);
    std::vector<std::string> expected = {"subject_id", "frame_idx"};
    for (int j = 0; j < expected_dim; ++j) expected.push_back("f_" + std::to_string(j));
    t.require_header(expected);
    std::map<std::int64_t, std::vector<double>> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(expected_dim));
        for (int j = 0; j < expected_dim; ++j)
            row[static_cast<std::size_t>(j)] = t.cell_double(i, 2 + static_cast<std::size_t>(j));
        out[t.cell_int(i, 1)] = std::move(row);
    }
    return out;
}

}  // namespace

json sync(const json& options) {
    const std::string corpus = require_string(options, "corpus");
    const CorpusMeta meta = load_meta((fs::path(corpus) / "meta.json").string());

    AssembleOptions asm_opt;
    asm_opt.label_type = parse_label_type(options.value("label_type", std::string("audio")));
    asm_opt.modalities = ModalitySet::parse(require_string(options, "modalities"));
    asm_opt.speaking = parse_speaking(options.value("speaking", std::string("all")));
    if (options.contains("keep_audio"))
        asm_opt.keep_audio = options.at("keep_audio").get<std::vector<std::string>>();
    if (options.contains("keep_video"))
        asm_opt.keep_video = options.at("keep_video").get<std::vector<std::string>>();

    // gold standards
    const auto all_segments = load_gold_audio(require_string(options, "gold_audio"), "");
    std::map<std::string, std::vector<AudioSegment>> segments_by_subject;
    for (const auto& s : all_segments) segments_by_subject[s.subject_id].push_back(s);

    std::map<std::string, std::vector<std::string>> video_by_subject;
    if (options.contains("gold_video")) {
        CsvTable vg = read_csv(options.at("gold_video").get<std::string>());
        vg.require_header({"subject_id", "frame_idx", "label"});
        for (std::size_t i = 0; i < vg.rows.size(); ++i)
            video_by_subject[vg.cell(i, 0)].push_back(vg.cell(i, 2));
    }

    // gaze windows
    std::map<std::string, std::vector<WindowFeature>> windows_by_subject;
    if (asm_opt.modalities.G) {
        const std::string gaze_path = require_string(options, "gaze_features");
        std::int64_t window_ms = 1500;
        try {
            const json side = read_json_file(gaze_path + ".schema.json");
            window_ms = side.value("window_ms", std::int64_t(1500));
        } catch (const ValidationError&) {
        }
        CsvTable t = read_csv(gaze_path);
        std::vector<std::string> expected = {"subject_id", "center_ms"};
        for (int j = 0; j < kWindowDim; ++j) expected.push_back("f_" + std::to_string(j));
        t.require_header(expected);
        const std::int64_t half = window_ms / 2;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            WindowFeature w;
            w.center_ms = t.cell_int(i, 1);
            // coverage reconstructed from the nominal extent clipped to the
            // session; windows clipped by a short video lose end precision
            w.begin_ms = std::max<std::int64_t>(w.center_ms - half, 0);
            w.end_ms = std::min<std::int64_t>(w.center_ms + half, meta.session_ms);
            w.values.reserve(kWindowDim);
            for (int j = 0; j < kWindowDim; ++j)
                w.values.push_back(t.cell_double(i, 2 + static_cast<std::size_t>(j)));
            windows_by_subject[t.cell(i, 0)].push_back(std::move(w));
        }
    }

    // speech enrichment across all subjects (feature extractors train on
    // everything, like the upstream backbones)
    std::map<std::string, std::map<std::int64_t, std::vector<double>>> a_by_subject;
    json enrichment_summary;
    if (asm_opt.modalities.A) {
        EnrichmentConfig cfg = EnrichmentConfig::defaults();
        std::uint64_t enrich_seed = 7;
        if (options.contains("enrich")) {
            const json& e = options.at("enrich");
            cfg.iterations = e.value("iterations", cfg.iterations);
            cfg.batch_size = e.value("batch", cfg.batch_size);
            cfg.learning_rate = e.value("lr", cfg.learning_rate);
            cfg.minority_boost = e.value("minority_boost", cfg.minority_boost);
            enrich_seed = e.value("seed", enrich_seed);
        }

        Dataset embeddings;
        embeddings.dim = static_cast<std::size_t>(cfg.input_dim);
        std::vector<int> cat, val, aro, dom;
        std::vector<std::pair<std::string, std::int64_t>> row_key;
        for (const auto& subject : meta.subjects) {
            const fs::path path = fs::path(corpus) / "embeddings/audio" / (subject.id + ".csv");
            if (!fs::exists(path)) continue;
            EmbeddingFile file = load_embeddings(path.string(), cfg.input_dim);
            const auto& segs = segments_by_subject[subject.id];
            for (std::size_t i = 0; i < file.embeddings.n; ++i) {
                const double* row = file.embeddings.row(i);
                embeddings.x.insert(embeddings.x.end(), row, row + embeddings.dim);
                ++embeddings.n;
                row_key.push_back({subject.id, file.segment_index[i]});
                int c = -1;
                for (const auto& s : segs)
                    if (s.segment_index == file.segment_index[i]) {
                        c = labels::index_of(labels::kAudioEmotions, s.label);
                        break;
                    }
                cat.push_back(c);
                val.push_back(file.valence[i]);
                aro.push_back(file.arousal[i]);
                dom.push_back(file.dominance[i]);
            }
        }
        if (embeddings.n == 0) throw ValidationError("sync: no embeddings found under " + corpus);
        const SpeechEnrichment enr =
            SpeechEnrichment::train(embeddings, {cat, val, aro, dom}, cfg, enrich_seed);
        for (std::size_t i = 0; i < embeddings.n; ++i)
            a_by_subject[row_key[i].first][row_key[i].second] = enr.apply(embeddings.row(i));
        enrichment_summary = {{"iterations", cfg.iterations},
                              {"rows", embeddings.n},
                              {"head_accuracy",
                               {enr.head_train_accuracy(0), enr.head_train_accuracy(1),
                                enr.head_train_accuracy(2), enr.head_train_accuracy(3)}}};
    }

    // per-subject bundles
    std::vector<SubjectData> subjects;
    for (const auto& subject : meta.subjects) {
        SubjectData d;
        d.subject_id = subject.id;
        d.country = subject.country;
        d.fps = meta.fps;
        d.segments = segments_by_subject[subject.id];
        auto vit = video_by_subject.find(subject.id);
        if (vit != video_by_subject.end()) d.video_gold = vit->second;
        auto wit = windows_by_subject.find(subject.id);
        if (wit != windows_by_subject.end()) d.windows = wit->second;
        if (asm_opt.modalities.F) {
            const fs::path path = fs::path(corpus) / "features/face" / (subject.id + ".csv");
            if (fs::exists(path)) d.face_frames = load_face_file(path.string(), kFaceFrameDim);
        }
        auto ait = a_by_subject.find(subject.id);
        if (ait != a_by_subject.end()) d.a_features = ait->second;
        subjects.push_back(std::move(d));
    }

    const SampleMatrix matrix = assemble_dataset(subjects, asm_opt);
    const std::string out_path = require_string(options, "out");
    save_matrix(matrix, out_path);

    json summary;
    summary["rows"] = matrix.rows.size();
    summary["feature_dim"] = matrix.feature_dim;
    summary["blocks"] = matrix.block_names;
    summary["block_widths"] = matrix.block_widths;
    summary["retention"] = matrix.retention.fraction();
    summary["dropped_by_reason"] = matrix.retention.dropped_by_reason;
    if (!enrichment_summary.is_null()) summary["enrichment"] = enrichment_summary;
    return summary;
}

// ---- train -------------------------------------------------------------------

namespace {

struct EncodedMatrix {
    Dataset data;
    std::vector<std::string> classes;
};

EncodedMatrix encode_matrix(const SampleMatrix& matrix) {
    EncodedMatrix out;
    out.classes = matrix.label_type == LabelType::Audio ? labels::kAudioKeep : labels::kVideoKeep;
    out.data.dim = matrix.feature_dim;
    for (const auto& row : matrix.rows) {
        const std::string& label =
            matrix.label_type == LabelType::Audio ? row.audio_label : row.video_label;
        const int cls = labels::index_of(out.classes, label);
        if (cls < 0) continue;
        out.data.x.insert(out.data.x.end(), row.features.begin(), row.features.end());
        out.data.y.push_back(cls);
        ++out.data.n;
    }
    return out;
}

}  // namespace

json train(const json& options) {
    const SampleMatrix matrix = load_matrix(require_string(options, "matrix"));
    EncodedMatrix enc = encode_matrix(matrix);
    if (enc.data.n == 0) throw ValidationError("train: matrix has no labeled rows");

    TrainConfig cfg;
    cfg.adam.learning_rate = options.value("lr", 1e-4);
    cfg.batch_size = options.value("batch", 64);
    cfg.dropout_rate = options.value("dropout", 0.5);
    const std::string country = options.value("country", std::string(labels::kWhole));
    cfg.epochs = options.value("epochs", default_epochs(matrix.label_type, country));
    cfg.per_epoch_budget = options.value("budget", std::int64_t(0));
    const std::uint64_t seed = options.value("seed", std::uint64_t(1));
    const std::vector<int> arch = parse_arch(options.value("arch", json("100-20")));

    const Normalizer nz = Normalizer::fit(enc.data);
    Dataset data = enc.data;
    nz.apply(data);

    std::vector<int> widths;
    widths.push_back(static_cast<int>(data.dim));
    widths.insert(widths.end(), arch.begin(), arch.end());
    widths.push_back(static_cast<int>(enc.classes.size()));
    MlpModel model = MlpModel::init(widths, split_seed(seed, 0xA11), cfg.dropout_rate);
    const TrainResult result = train_mlp(model, data, cfg, split_seed(seed, 0x7247));

    std::int64_t correct = 0;
    for (std::size_t i = 0; i < data.n; ++i) {
        const auto p = model.forward(data.row(i));
        if (static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) == data.y[i]) ++correct;
    }

    json model_json;
    model_json["format_version"] = 1;
    model_json["label_type"] = matrix.label_type == LabelType::Audio ? "audio" : "video";
    model_json["classes"] = enc.classes;
    model_json["widths"] = model.widths;
    model_json["dropout_rate"] = model.dropout_rate;
    model_json["seed"] = seed;
    model_json["normalizer"] = {{"min", nz.min}, {"max", nz.max}};
    model_json["weights"] = model.weights;
    model_json["biases"] = model.biases;
    model_json["loss_curve"] = result.epoch_loss;
    write_json_file(model_json, require_string(options, "out"));

    json summary;
    summary["rows"] = enc.data.n;
    summary["arch"] = arch;
    summary["epochs"] = cfg.epochs;
    summary["final_loss"] = result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back();
    summary["train_accuracy"] = static_cast<double>(correct) / static_cast<double>(data.n);
    return summary;
}

// ---- eval --------------------------------------------------------------------

json eval(const json& options) {
    json config = options;
    if (options.contains("config")) {
        const json& c = options.at("config");
        config = c.is_string() ? read_json_file(c.get<std::string>()) : c;
    }
    if (options.contains("seed")) config["seed"] = options.at("seed");

    std::map<std::string, SampleMatrix> matrices;
    if (config.contains("matrices"))
        for (const auto& [name, path] : config.at("matrices").items())
            matrices[name] = load_matrix(path.get<std::string>());
    if (config.contains("matrix")) matrices["default"] = load_matrix(config.at("matrix").get<std::string>());
    if (matrices.empty()) throw ValidationError("eval: no matrices configured");

    // fold plan over every subject seen in any matrix
    std::map<std::string, std::string> country_of;
    for (const auto& [name, m] : matrices)
        for (const auto& row : m.rows) country_of[row.subject_id] = row.country;
    std::vector<Subject> subjects;
    for (const auto& [id, country] : country_of) subjects.push_back({id, country});
    const int k = config.value("k", 10);
    const std::uint64_t seed = config.value("seed", std::uint64_t(1));
    const FoldPlan plan = make_folds(subjects, k, split_seed(seed, 0xF01d));

    const std::string out_dir = config.value("out", std::string("reports"));
    fs::create_directories(out_dir);

    json summary = json::array();
    if (!config.contains("experiments")) throw ValidationError("eval: no experiments configured");
    for (const auto& e : config.at("experiments")) {
        const std::string id = e.at("id").get<std::string>();
        const std::string matrix_name = e.value("matrix", std::string("default"));
        auto mit = matrices.find(matrix_name);
        if (mit == matrices.end())
            throw ValidationError("eval: experiment '" + id + "' wants unknown matrix '" + matrix_name + "'");
        const SampleMatrix& matrix = mit->second;

        ExperimentConfig cfg;
        cfg.id = id;
        cfg.train_country = e.value("train_country", std::string(labels::kWhole));
        cfg.test_country = e.value("test_country", std::string(labels::kWhole));
        cfg.speaking_train = parse_speaking(e.value("speaking_train", std::string("all")));
        cfg.speaking_test = parse_speaking(e.value("speaking_test", std::string("all")));
        cfg.runs = e.value("runs", config.value("runs", 3));
        cfg.validation_fraction = e.value("validation_fraction", 0.1);
        cfg.seed = split_seed(seed, std::hash<std::string>{}(id));
        if (e.contains("archs")) {
            cfg.archs.clear();
            for (const auto& a : e.at("archs")) cfg.archs.push_back(parse_arch(a));
        }
        cfg.train.adam.learning_rate = e.value("lr", 1e-4);
        cfg.train.batch_size = e.value("batch", 64);
        cfg.train.dropout_rate = e.value("dropout", 0.5);
        cfg.train.epochs = e.value("epochs", default_epochs(matrix.label_type, cfg.train_country));
        cfg.train.per_epoch_budget =
            e.value("budget", default_budget(matrix.label_type, cfg.train_country));

        const EvalReport report = run_experiment(matrix, plan, cfg);
        write_json_file(report_to_json(report), (fs::path(out_dir) / (id + ".report.json")).string());
        summary.push_back({{"id", id},
                           {"uar_mean", report.uar_mean},
                           {"uar_sem", report.uar_sem},
                           {"arch", report.arch},
                           {"evals", report.uar_per_eval.size()}});
    }

    json manifest;
    manifest["seed"] = seed;
    manifest["k"] = k;
    manifest["experiments"] = summary;
    write_json_file(manifest, (fs::path(out_dir) / "run_manifest.json").string());
    return manifest;
}

// ---- stats -------------------------------------------------------------------

namespace {

std::vector<EvalReport> load_reports(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.substr(name.size() - 12) == ".report.json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<EvalReport> reports;
    for (const auto& f : files) reports.push_back(report_from_json(read_json_file(f.string())));
    return reports;
}

}  // namespace

json stats(const json& options) {
    const std::string dir = require_string(options, "reports");
    const double q = options.value("q", 0.05);
    const std::string group_by = options.value("group_by", std::string("country"));
    const auto reports = load_reports(dir);
    if (reports.empty()) throw ValidationError("stats: no .report.json files in " + dir);

    const auto comparisons = pairwise_stats(reports, q, group_by);
    const std::string out_path = options.value("out", (fs::path(dir) / "pairwise_stats.csv").string());
    CsvWriter w(out_path);
    w.header({"group", "experiment_a", "experiment_b", "mean_diff", "t", "p", "reject_bky", "degenerate"});
    std::int64_t rejected = 0;
    for (const auto& c : comparisons) {
        w.field(c.group);
        w.field(c.experiment_a);
        w.field(c.experiment_b);
        w.field(c.mean_diff);
        w.field(c.t);
        w.field(c.p);
        w.field(std::int64_t(c.reject ? 1 : 0));
        w.field(std::int64_t(c.degenerate ? 1 : 0));
        w.end_row();
        rejected += c.reject ? 1 : 0;
    }
    json summary;
    summary["comparisons"] = comparisons.size();
    summary["rejected"] = rejected;
    summary["q"] = q;
    summary["group_by"] = group_by;
    summary["out"] = out_path;
    return summary;
}

// ---- report ------------------------------------------------------------------

json report(const json& options) {
    const std::string dir = require_string(options, "reports");
    const std::string out_dir = options.value("out", dir);
    fs::create_directories(out_dir);
    const auto reports = load_reports(dir);
    if (reports.empty()) throw ValidationError("report: no .report.json files in " + dir);

    render_result_tables(reports, out_dir);
    const auto svgs = render_country_charts(reports, out_dir);

    json summary;
    summary["reports"] = reports.size();
    summary["charts"] = svgs;
    summary["out"] = out_dir;
    return summary;
}

}  // namespace affectfuse::pipeline
