#pragma once

#include <string>

#include <json.hpp>

#include "attention.hpp"
#include "evaluation.hpp"
#include "sync.hpp"
#include "trajectories.hpp"

// File-to-file stage drivers shared by the C API and the test suites. Every
// stage takes a JSON options object (the CLI builds it from flags) and
// returns a JSON summary. Bad input raises ValidationError, processing
// failures RuntimeError.
namespace affectfuse::pipeline {

using nlohmann::json;

json synth(const json& options);     // {"spec": path|object, "out": dir, "seed"?: n}
json validate(const json& options);  // {"corpus": dir} -> {"ok": bool, "violations": [...]}
json goldstd(const json& options);   // {"channel": "audio"|"video", "input": dir, "out": file, ...}
json kappa(const json& options);     // {"channel", "input", "out", "contingency"?: {...}}
json gazefeat(const json& options);  // {"input": dir|file, "out": file, "glasses"?, "diagnostics"?, ...}
json sync(const json& options);      // {"corpus", "gold_audio", "gold_video", "gaze_features", ...}
json train(const json& options);     // {"matrix", "label_type", "arch", "out", ...}
json eval(const json& options);      // {"config": path|object}
json stats(const json& options);     // {"reports": dir, "q": 0.05, "group_by"?, "out": file}
json report(const json& options);    // {"reports": dir, "out": dir}

// ---- format helpers (exposed for tests) -----------------------------------

struct CorpusMeta {
    Rational fps;
    std::int64_t session_ms = 0;
    std::vector<Subject> subjects;
    double vc_x = 0.0, vc_y = 0.0;
};

CorpusMeta load_meta(const std::string& path);

std::vector<std::vector<AnnotationEvent>> load_annotation_events(const std::string& path);
std::vector<AudioSegment> load_gold_audio(const std::string& path, const std::string& subject_id);
SampleMatrix load_matrix(const std::string& csv_path);
void save_matrix(const SampleMatrix& matrix, const std::string& csv_path);

EvalReport report_from_json(const json& j);
json report_to_json(const EvalReport& r);

// per-subject window feature extraction used by gazefeat (exposed for the
// acceptance suite, which checks the recovered cluster against the planted
// hotspot)
struct GazefeatParams {
    WindowParams window;
    EyeInHeadMode eye_mode = EyeInHeadMode::Subtraction;
    int median_width = 5;
    double prefilter_scale = 3.0;
    std::size_t cluster_max_points = 250;
    double bandwidth_iqr_factor = 1.5;
    MahalanobisWeightParams weight;
    int glasses_flag = 0;
};

struct SubjectWindows {
    std::vector<WindowFeature> windows;
    WindowStats window_stats;
    std::int64_t dropped_feature_rows = 0;  // kept windows with < 2 valid frames
    std::vector<VCCluster> clusters;        // sorted by member count
    double bandwidth = 0.0;
    std::int64_t zero_weight_windows = 0;
};

SubjectWindows extract_subject_windows(std::vector<TrajectoryFrame>& frames,
                                       const std::string& subject_id, const GazefeatParams& params);

std::vector<TrajectoryFrame> load_trajectories(const std::string& path);

}  // namespace affectfuse::pipeline
