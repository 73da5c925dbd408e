#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "csvio.hpp"
#include "errors.hpp"
#include "labels.hpp"
#include "pipeline.hpp"

namespace fs = std::filesystem;

namespace affectfuse::pipeline {

CorpusMeta load_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json j = json::parse(in, nullptr, true, true);
    CorpusMeta meta;
    meta.fps = parse_rational(j.at("fps").get<std::string>());
    meta.session_ms = j.at("session_ms").get<std::int64_t>();
    for (const auto& s : j.at("subjects"))
        meta.subjects.push_back({s.at("id").get<std::string>(), s.at("country").get<std::string>()});
    if (j.contains("vc_location")) {
        meta.vc_x = j["vc_location"][0].get<double>();
        meta.vc_y = j["vc_location"][1].get<double>();
    }
    return meta;
}

std::vector<std::vector<AnnotationEvent>> load_annotation_events(const std::string& path) {
    CsvTable t = read_csv(path);
    t.require_header({"rater_id", "channel", "start_ms", "end_ms", "label"});
    const std::size_t c_rater = 0, c_channel = 1, c_start = 2, c_end = 3, c_label = 4;
    std::map<std::string, std::vector<AnnotationEvent>> by_rater;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        AnnotationEvent e;
        e.rater_id = t.cell(i, c_rater);
        const std::string& ch = t.cell(i, c_channel);
        if (ch == "audio")
            e.channel = Channel::Audio;
        else if (ch == "video")
            e.channel = Channel::Video;
        else
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[i]) +
                                  ": unknown channel '" + ch + "'");
        e.start_ms = t.cell_int(i, c_start);
        e.end_ms = t.cell_int(i, c_end);
        e.label = t.cell(i, c_label);
        if (e.start_ms >= e.end_ms)
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[i]) +
                                  ": start_ms >= end_ms");
        by_rater[e.rater_id].push_back(std::move(e));
    }
    std::vector<std::vector<AnnotationEvent>> out;
    for (auto& [rater, events] : by_rater) out.push_back(std::move(events));
    return out;
}

std::vector<AudioSegment> load_gold_audio(const std::string& path, const std::string& subject_id) {
    CsvTable t = read_csv(path);
    t.require_header({"subject_id", "segment_index", "start_ms", "end_ms", "label"});
    std::vector<AudioSegment> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (!subject_id.empty() && t.cell(i, 0) != subject_id) continue;
        AudioSegment s;
        s.subject_id = t.cell(i, 0);
        s.segment_index = t.cell_int(i, 1);
        s.start_ms = t.cell_int(i, 2);
        s.end_ms = t.cell_int(i, 3);
        s.label = t.cell(i, 4);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<TrajectoryFrame> load_trajectories(const std::string& path) {
    CsvTable t = read_csv(path);
    t.require_header({"subject_id", "frame_idx", "t_ms", "gaze_x", "gaze_y", "head_yaw", "head_pitch",
                      "head_roll", "origin_x", "origin_y", "origin_z", "plane_x", "plane_y", "detected"});
    std::vector<TrajectoryFrame> frames;
    frames.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        TrajectoryFrame f;
        f.frame_idx = t.cell_int(i, 1);
        f.t_ms = t.cell_int(i, 2);
        f.gaze_x = t.cell_double(i, 3);
        f.gaze_y = t.cell_double(i, 4);
        f.head_yaw = t.cell_double(i, 5);
        f.head_pitch = t.cell_double(i, 6);
        f.head_roll = t.cell_double(i, 7);
        f.origin[0] = t.cell_double(i, 8);
        f.origin[1] = t.cell_double(i, 9);
        f.origin[2] = t.cell_double(i, 10);
        f.plane_x = t.cell_double(i, 11);
        f.plane_y = t.cell_double(i, 12);
        f.has_plane_point = std::isfinite(f.plane_x) && std::isfinite(f.plane_y);
        f.detected = t.cell_int(i, 13) != 0;
        frames.push_back(f);
    }
    return frames;
}

void save_matrix(const SampleMatrix& matrix, const std::string& csv_path) {
    CsvWriter w(csv_path);
    std::vector<std::string> header = {"subject_id", "country",     "t_center_ms",
                                       "speaking",   "audio_label", "video_label"};
    for (std::size_t b = 0; b < matrix.block_names.size(); ++b)
        for (std::size_t j = 0; j < matrix.block_widths[b]; ++j)
            header.push_back(matrix.block_names[b] + "_" + std::to_string(j));
    w.header(header);
    for (const auto& row : matrix.rows) {
        w.field(row.subject_id);
        w.field(row.country);
        w.field(row.t_center_ms);
        w.field(std::int64_t(row.speaking ? 1 : 0));
        w.field(row.audio_label);
        w.field(row.video_label);
        for (double v : row.features) w.field(v);
        w.end_row();
    }

    json sidecar;
    sidecar["label_type"] = matrix.label_type == LabelType::Audio ? "audio" : "video";
    sidecar["modalities"] = matrix.modalities.to_string();
    sidecar["speaking"] = matrix.speaking == SpeakingFilter::All
                              ? "all"
                              : (matrix.speaking == SpeakingFilter::Speech ? "speech" : "silence");
    sidecar["blocks"] = matrix.block_names;
    sidecar["block_widths"] = matrix.block_widths;
    sidecar["feature_dim"] = matrix.feature_dim;
    sidecar["rows"] = matrix.rows.size();
    sidecar["retention"] = {{"candidates", matrix.retention.candidates},
                            {"emitted", matrix.retention.emitted},
                            {"fraction", matrix.retention.fraction()},
                            {"dropped_by_reason", matrix.retention.dropped_by_reason}};
    std::ofstream side(csv_path + ".schema.json");
    side << sidecar.dump(2) << "\n";
}

SampleMatrix load_matrix(const std::string& csv_path) {
    std::ifstream side_in(csv_path + ".schema.json");
    if (!side_in) throw ValidationError("missing schema sidecar for " + csv_path);
    json sidecar = json::parse(side_in);

    SampleMatrix matrix;
    matrix.label_type = sidecar.at("label_type") == "audio" ? LabelType::Audio : LabelType::Video;
    matrix.modalities = ModalitySet::parse(sidecar.at("modalities").get<std::string>());
    const std::string speaking = sidecar.at("speaking").get<std::string>();
    matrix.speaking = speaking == "all" ? SpeakingFilter::All
                                        : (speaking == "speech" ? SpeakingFilter::Speech
                                                                : SpeakingFilter::Silence);
    matrix.block_names = sidecar.at("blocks").get<std::vector<std::string>>();
    matrix.block_widths = sidecar.at("block_widths").get<std::vector<std::size_t>>();
    matrix.feature_dim = sidecar.at("feature_dim").get<std::size_t>();
    matrix.retention.candidates = sidecar.at("retention").at("candidates").get<std::int64_t>();
    matrix.retention.emitted = sidecar.at("retention").at("emitted").get<std::int64_t>();

    CsvTable t = read_csv(csv_path);
    std::vector<std::string> expected = {"subject_id", "country",     "t_center_ms",
                                         "speaking",   "audio_label", "video_label"};
    for (std::size_t b = 0; b < matrix.block_names.size(); ++b)
        for (std::size_t j = 0; j < matrix.block_widths[b]; ++j)
            expected.push_back(matrix.block_names[b] + "_" + std::to_string(j));
    t.require_header(expected);

    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        SampleRow row;
        row.subject_id = t.cell(i, 0);
        row.country = t.cell(i, 1);
        row.t_center_ms = t.cell_int(i, 2);
        row.speaking = t.cell_int(i, 3) != 0;
        row.audio_label = t.cell(i, 4);
        row.video_label = t.cell(i, 5);
        row.features.reserve(matrix.feature_dim);
        for (std::size_t j = 0; j < matrix.feature_dim; ++j)
            row.features.push_back(t.cell_double(i, 6 + j));
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

json report_to_json(const EvalReport& r) {
    json j;
    j["format_version"] = 1;
    j["id"] = r.id;
    j["label_type"] = r.label_type;
    j["modalities"] = r.modalities;
    j["train_country"] = r.train_country;
    j["test_country"] = r.test_country;
    j["speaking_train"] = r.speaking_train;
    j["speaking_test"] = r.speaking_test;
    j["classes"] = r.classes;
    j["arch"] = r.arch;
    j["folds"] = r.folds;
    j["runs"] = r.runs;
    j["uar_per_eval"] = r.uar_per_eval;
    j["uar_mean"] = r.uar_mean;
    j["uar_sem"] = r.uar_sem;
    j["per_class_recall_mean"] = r.per_class_recall_mean;
    j["per_class_recall_sem"] = r.per_class_recall_sem;
    j["confusion_total"] = r.confusion_total;
    j["n_train_per_fold"] = r.n_train_per_fold;
    j["n_test_per_fold"] = r.n_test_per_fold;
    j["skipped_folds"] = r.skipped_folds;
    j["seed"] = r.seed;
    return j;
}

EvalReport report_from_json(const json& j) {
    EvalReport r;
    r.id = j.at("id").get<std::string>();
    r.label_type = j.at("label_type").get<std::string>();
    r.modalities = j.at("modalities").get<std::string>();
    r.train_country = j.at("train_country").get<std::string>();
    r.test_country = j.at("test_country").get<std::string>();
    r.speaking_train = j.at("speaking_train").get<std::string>();
    r.speaking_test = j.at("speaking_test").get<std::string>();
    r.classes = j.at("classes").get<std::vector<std::string>>();
    r.arch = j.at("arch").get<std::vector<int>>();
    r.folds = j.at("folds").get<int>();
    r.runs = j.at("runs").get<int>();
    r.uar_per_eval = j.at("uar_per_eval").get<std::vector<double>>();
    r.uar_mean = j.at("uar_mean").get<double>();
    r.uar_sem = j.at("uar_sem").get<double>();
    r.per_class_recall_mean = j.at("per_class_recall_mean").get<std::vector<double>>();
    r.per_class_recall_sem = j.at("per_class_recall_sem").get<std::vector<double>>();
    r.confusion_total = j.at("confusion_total").get<std::vector<std::vector<std::int64_t>>>();
    r.n_train_per_fold = j.at("n_train_per_fold").get<std::vector<std::int64_t>>();
    r.n_test_per_fold = j.at("n_test_per_fold").get<std::vector<std::int64_t>>();
    r.skipped_folds = j.at("skipped_folds").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

}  // namespace affectfuse::pipeline
