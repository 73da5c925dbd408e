#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>

#include "csvio.hpp"
#include "errors.hpp"
#include "labels.hpp"
#include "functionals.hpp"
#include "pipeline_detail.hpp"
#include "stats.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;

namespace affectfuse::pipeline {

using detail::read_json_file;
using detail::require_string;
using detail::subject_files;
using detail::subject_of;
using detail::write_json_file;

// ---- synth -----------------------------------------------------------------

json synth(const json& options) {
    SyntheticSpec spec;
    if (options.contains("spec")) {
        const json& s = options.at("spec");
        if (s.is_string())
            spec = SyntheticSpec::from_json_text(read_json_file(s.get<std::string>()).dump());
        else
            spec = SyntheticSpec::from_json_text(s.dump());
    }
    if (options.contains("seed")) spec.seed = options.at("seed").get<std::uint64_t>();
    const std::string out_dir = require_string(options, "out");
    const SynthResult result = synth_corpus(spec, out_dir);
    json summary;
    summary["subjects"] = result.subject_ids;
    summary["files"] = result.files_written.size();
    summary["out"] = out_dir;
    return summary;
}

// ---- validate ---------------------------------------------------------------

namespace {

struct Violations {
    json list = json::array();
    void add(const std::string& file, std::size_t line, const std::string& message) {
        list.push_back({{"file", file}, {"line", line}, {"message", message}});
    }
};

void check_labels_column(const CsvTable& t, std::size_t col, const std::vector<std::string>& vocab,
                         bool allow_empty, Violations& v) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::string& label = t.cell(i, col);
        if (label.empty() && allow_empty) continue;
        if (!labels::contains(vocab, label))
            v.add(t.path, t.line_numbers[i],
                  "unknown label '" + label + "' (allowed: " + join(vocab, ",") +
                      (allow_empty ? " or empty)" : ")"));
    }
}

}  // namespace

json validate(const json& options) {
    const std::string corpus = require_string(options, "corpus");
    Violations v;
    CorpusMeta meta;
    bool have_meta = false;
    const std::string meta_path = (fs::path(corpus) / "meta.json").string();
    try {
        meta = load_meta(meta_path);
        have_meta = true;
    } catch (const std::exception& e) {
        v.add(meta_path, 0, e.what());
    }

    if (have_meta) {
        for (const auto& subject : meta.subjects) {
            const std::string id = subject.id;
            // audio annotations
            const std::string apath = (fs::path(corpus) / "annotations/audio" / (id + ".csv")).string();
            try {
                CsvTable t = read_csv(apath);
                t.require_header({"rater_id", "channel", "start_ms", "end_ms", "label"});
                std::vector<std::string> vocab = labels::kAudioEmotions;
                check_labels_column(t, 4, vocab, false, v);
                for (std::size_t i = 0; i < t.rows.size(); ++i) {
                    if (t.cell_int(i, 2) >= t.cell_int(i, 3))
                        v.add(apath, t.line_numbers[i], "event start >= end");
                }
            } catch (const std::exception& e) {
                v.add(apath, 1, e.what());
            }
            // video annotations
            const std::string vpath = (fs::path(corpus) / "annotations/video" / (id + ".csv")).string();
            try {
                CsvTable t = read_csv(vpath);
                t.require_header({"subject_id", "frame_idx", "label_rater_a", "label_rater_b"});
                if (!t.metadata.count("fps"))
                    v.add(vpath, 1, "missing '# fps=' metadata line");
                check_labels_column(t, 2, labels::kVideoEmotions, true, v);
                check_labels_column(t, 3, labels::kVideoEmotions, true, v);
            } catch (const std::exception& e) {
                v.add(vpath, 1, e.what());
            }
            // trajectories
            const std::string tpath = (fs::path(corpus) / "trajectories" / (id + ".csv")).string();
            try {
                auto frames = load_trajectories(tpath);
                for (std::size_t i = 1; i < frames.size(); ++i)
                    if (frames[i].t_ms <= frames[i - 1].t_ms) {
                        v.add(tpath, i + 2, "non-monotonic t_ms");
                        break;
                    }
            } catch (const std::exception& e) {
                v.add(tpath, 1, e.what());
            }
            // embeddings
            const std::string epath = (fs::path(corpus) / "embeddings/audio" / (id + ".csv")).string();
            try {
                CsvTable t = read_csv(epath);
                if (t.header.size() < 6 || t.header[0] != "subject_id" || t.header[1] != "segment_index")
                    v.add(epath, 1, "unexpected embeddings header");
                check_labels_column(t, 2, labels::kValence, false, v);
                check_labels_column(t, 3, labels::kArousal, false, v);
                check_labels_column(t, 4, labels::kDominance, false, v);
            } catch (const std::exception& e) {
                v.add(epath, 1, e.what());
            }
            // face features
            const std::string fpath = (fs::path(corpus) / "features/face" / (id + ".csv")).string();
            try {
                CsvTable t = read_csv(fpath);
                if (t.header.size() < 3 || t.header[0] != "subject_id" || t.header[1] != "frame_idx")
                    v.add(fpath, 1, "unexpected face feature header");
            } catch (const std::exception& e) {
                v.add(fpath, 1, e.what());
            }
        }
        const std::string gpath = (fs::path(corpus) / "glasses.csv").string();
        try {
            CsvTable t = read_csv(gpath);
            t.require_header({"subject_id", "glasses_flag"});
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                const auto flag = t.cell_int(i, 1);
                if (flag < 0 || flag > 2)
                    v.add(gpath, t.line_numbers[i], "glasses flag must be 0, 1 or 2");
            }
        } catch (const std::exception& e) {
            v.add(gpath, 1, e.what());
        }
    }

    json out;
    out["ok"] = v.list.empty();
    out["violations"] = v.list;
    return out;
}

// ---- goldstd ----------------------------------------------------------------

namespace {

std::vector<Interval> load_avatar_track(const std::string& path) {
    CsvTable t = read_csv(path);
    t.require_header({"start_ms", "end_ms"});
    std::vector<Interval> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        out.push_back({t.cell_int(i, 0), t.cell_int(i, 1)});
    return out;
}

struct FrameTracks {
    Rational fps;
    std::vector<std::string> rater_a, rater_b;
};

FrameTracks load_frame_tracks(const std::string& path) {
    CsvTable t = read_csv(path);
    t.require_header({"subject_id", "frame_idx", "label_rater_a", "label_rater_b"});
    FrameTracks tracks;
    auto it = t.metadata.find("fps");
    if (it == t.metadata.end()) throw ValidationError(path + ": missing '# fps=' metadata line");
    tracks.fps = parse_rational(it->second);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.cell_int(i, 1) != static_cast<std::int64_t>(i))
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[i]) +
                                  ": frame_idx not contiguous");
        tracks.rater_a.push_back(t.cell(i, 2));
        tracks.rater_b.push_back(t.cell(i, 3));
    }
    return tracks;
}

}  // namespace

json goldstd(const json& options) {
    const std::string channel = require_string(options, "channel");
    const std::string input = require_string(options, "input");
    const std::string out_path = require_string(options, "out");
    json summary;
    summary["channel"] = channel;

    if (channel == "audio") {
        const double fraction = options.value("majority_fraction", 0.5);
        std::int64_t session_ms = options.value("session_ms", std::int64_t(0));
        if (options.contains("meta")) session_ms = load_meta(options.at("meta").get<std::string>()).session_ms;
        if (session_ms <= 0)
            throw ValidationError("goldstd audio needs session_ms (flag or meta.json)");
        const std::string avatar_dir = options.value("avatar", std::string());

        CsvWriter w(out_path);
        w.header({"subject_id", "segment_index", "start_ms", "end_ms", "label"});
        json label_counts = json::object();
        std::int64_t total = 0, avatar_dropped = 0;
        for (const auto& file : subject_files(input)) {
            const std::string subject = subject_of(file);
            auto events = load_annotation_events(file.string());
            auto segments = build_audio_gold(subject, events, session_ms, fraction);
            if (!avatar_dir.empty()) {
                const fs::path track = fs::path(avatar_dir) / (subject + ".csv");
                if (fs::exists(track)) {
                    const auto before = segments.size();
                    segments = filter_avatar_overlap(segments, load_avatar_track(track.string()));
                    avatar_dropped += static_cast<std::int64_t>(before - segments.size());
                }
            }
            for (const auto& s : segments) {
                w.field(s.subject_id);
                w.field(s.segment_index);
                w.field(s.start_ms);
                w.field(s.end_ms);
                w.field(s.label);
                w.end_row();
                ++total;
                label_counts[s.label] = label_counts.value(s.label, std::int64_t(0)) + 1;
            }
        }
        summary["segments"] = total;
        summary["avatar_dropped"] = avatar_dropped;
        summary["label_counts"] = label_counts;
        summary["majority_fraction"] = fraction;
        summary["rater_combination"] = "per-ms modal vote, ties unlabeled";
        write_json_file(summary, out_path + ".meta.json");
    } else if (channel == "video") {
        CsvWriter w(out_path);
        w.header({"subject_id", "frame_idx", "label"});
        json label_counts = json::object();
        std::int64_t total = 0;
        std::string fps;
        for (const auto& file : subject_files(input)) {
            const std::string subject = subject_of(file);
            FrameTracks tracks = load_frame_tracks(file.string());
            fps = std::to_string(tracks.fps.num) + "/" + std::to_string(tracks.fps.den);
            FrameLabelTrack a{subject, tracks.fps, tracks.rater_a};
            FrameLabelTrack b{subject, tracks.fps, tracks.rater_b};
            FrameLabelTrack gold = build_video_gold(a, b);
            for (std::size_t i = 0; i < gold.labels.size(); ++i) {
                w.field(subject);
                w.field(static_cast<std::int64_t>(i));
                w.field(gold.labels[i]);
                w.end_row();
                ++total;
                label_counts[gold.labels[i]] = label_counts.value(gold.labels[i], std::int64_t(0)) + 1;
            }
        }
        summary["frames"] = total;
        summary["label_counts"] = label_counts;
        summary["fps"] = fps;
        write_json_file(summary, out_path + ".meta.json");
    } else {
        throw ValidationError("channel must be audio or video, got '" + channel + "'");
    }
    return summary;
}

// ---- kappa ------------------------------------------------------------------

json kappa(const json& options) {
    const std::string channel = require_string(options, "channel");
    const std::string input = require_string(options, "input");
    const std::string out_path = require_string(options, "out");

    CsvWriter w(out_path);
    w.header({"channel", "subject_id", "rater_a", "rater_b", "kappa"});
    std::vector<double> values;

    if (channel == "audio") {
        std::int64_t session_ms = options.value("session_ms", std::int64_t(0));
        if (options.contains("meta")) session_ms = load_meta(options.at("meta").get<std::string>()).session_ms;
        if (session_ms <= 0) throw ValidationError("kappa audio needs session_ms (flag or meta.json)");
        for (const auto& file : subject_files(input)) {
            const std::string subject = subject_of(file);
            CsvTable t = read_csv(file.string());
            t.require_header({"rater_id", "channel", "start_ms", "end_ms", "label"});
            std::map<std::string, std::vector<AnnotationEvent>> by_rater;
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                AnnotationEvent e;
                e.rater_id = t.cell(i, 0);
                e.start_ms = t.cell_int(i, 2);
                e.end_ms = t.cell_int(i, 3);
                e.label = t.cell(i, 4);
                by_rater[e.rater_id].push_back(std::move(e));
            }
            std::map<std::string, std::vector<std::string>> ms_tracks;
            for (const auto& [rater, events] : by_rater)
                ms_tracks[rater] = events_to_ms_labels(events, session_ms);
            for (auto a = ms_tracks.begin(); a != ms_tracks.end(); ++a) {
                for (auto b = std::next(a); b != ms_tracks.end(); ++b) {
                    const double k = cohen_kappa(a->second, b->second);
                    values.push_back(k);
                    w.field(channel);
                    w.field(subject);
                    w.field(a->first);
                    w.field(b->first);
                    w.field(k);
                    w.end_row();
                }
            }
        }
    } else if (channel == "video") {
        for (const auto& file : subject_files(input)) {
            const std::string subject = subject_of(file);
            FrameTracks tracks = load_frame_tracks(file.string());
            // non-labeled frames count as the neutral expression
            auto fill = [](std::vector<std::string> t) {
                for (auto& l : t)
                    if (l.empty()) l = labels::kVideoNeutral;
                return t;
            };
            const double k = cohen_kappa(fill(tracks.rater_a), fill(tracks.rater_b));
            values.push_back(k);
            w.field(channel);
            w.field(subject);
            w.field(std::string("a"));
            w.field(std::string("b"));
            w.field(k);
            w.end_row();
        }
    } else {
        throw ValidationError("channel must be audio or video, got '" + channel + "'");
    }

    json summary;
    summary["channel"] = channel;
    summary["pairs"] = values.size();
    summary["mean_kappa"] = values.empty() ? 0.0 : mean(values);
    write_json_file(summary, out_path + ".meta.json");

    // optional audio-video contingency table, per country
    if (options.contains("contingency")) {
        const json& c = options.at("contingency");
        const CorpusMeta meta = load_meta(c.at("meta").get<std::string>());
        const auto segments = load_gold_audio(c.at("gold_audio").get<std::string>(), "");
        CsvTable vg = read_csv(c.at("gold_video").get<std::string>());
        vg.require_header({"subject_id", "frame_idx", "label"});
        std::map<std::string, std::vector<std::string>> video_by_subject;
        for (std::size_t i = 0; i < vg.rows.size(); ++i)
            video_by_subject[vg.cell(i, 0)].push_back(vg.cell(i, 2));
        std::map<std::string, std::vector<const Subject*>> by_country;
        for (const auto& s : meta.subjects) by_country[s.country].push_back(&s);

        CsvWriter cw(c.at("out").get<std::string>());
        cw.header({"country", "audio_label", "video_label", "count", "percent"});
        for (const auto& [country, subjects] : by_country) {
            ContingencyTable total;
            total.audio_labels = labels::kAudioKeep;
            total.video_labels = labels::kVideoKeep;
            total.counts.assign(3, std::vector<std::int64_t>(3, 0));
            for (const Subject* subj : subjects) {
                std::vector<AudioSegment> segs;
                for (const auto& s : segments)
                    if (s.subject_id == subj->id) segs.push_back(s);
                auto vit = video_by_subject.find(subj->id);
                if (vit == video_by_subject.end()) continue;
                FrameLabelTrack track{subj->id, meta.fps, vit->second};
                auto t = contingency_audio_video(segs, track, labels::kAudioKeep, labels::kVideoKeep);
                for (std::size_t r = 0; r < 3; ++r)
                    for (std::size_t cc = 0; cc < 3; ++cc) total.counts[r][cc] += t.counts[r][cc];
                total.total += t.total;
                total.skipped += t.skipped;
            }
            for (std::size_t r = 0; r < 3; ++r) {
                for (std::size_t cc = 0; cc < 3; ++cc) {
                    cw.field(country);
                    cw.field(labels::kAudioKeep[r]);
                    cw.field(labels::kVideoKeep[cc]);
                    cw.field(total.counts[r][cc]);
                    cw.field(total.total ? 100.0 * static_cast<double>(total.counts[r][cc]) /
                                               static_cast<double>(total.total)
                                         : 0.0);
                    cw.end_row();
                }
            }
        }
    }
    return summary;
}

// ---- gazefeat ----------------------------------------------------------------

SubjectWindows extract_subject_windows(std::vector<TrajectoryFrame>& frames,
                                       const std::string& subject_id, const GazefeatParams& params) {
    SubjectWindows result;
    if (frames.empty()) return result;

    std::vector<bool> detected(frames.size());
    std::vector<double> gx(frames.size()), gy(frames.size()), hy(frames.size()), hp(frames.size()),
        hr(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        detected[i] = frames[i].detected;
        gx[i] = frames[i].gaze_x;
        gy[i] = frames[i].gaze_y;
        hy[i] = frames[i].head_yaw;
        hp[i] = frames[i].head_pitch;
        hr[i] = frames[i].head_roll;
    }
    gx = median_filter_masked(gx, detected, params.median_width);
    gy = median_filter_masked(gy, detected, params.median_width);
    hy = median_filter_masked(hy, detected, params.median_width);
    hp = median_filter_masked(hp, detected, params.median_width);
    hr = median_filter_masked(hr, detected, params.median_width);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        frames[i].gaze_x = gx[i];
        frames[i].gaze_y = gy[i];
        frames[i].head_yaw = hy[i];
        frames[i].head_pitch = hp[i];
        frames[i].head_roll = hr[i];
        eye_in_head(gx[i], gy[i], hy[i], hp[i], hr[i], frames[i].eye_x, frames[i].eye_y,
                    params.eye_mode);
    }

    const std::vector<bool> validity = validate_frames(frames);
    for (std::size_t i = 0; i < frames.size(); ++i) frames[i].valid = validity[i];
    const auto windows = make_windows(frames, validity, subject_id, params.window, &result.window_stats);

    // looking-at-VC: cluster the valid gaze points on the camera plane
    std::vector<Vec2> points;
    std::vector<std::size_t> point_frame;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!validity[i] || !frames[i].has_plane_point) continue;
        points.push_back({frames[i].plane_x, frames[i].plane_y});
        point_frame.push_back(i);
    }

    std::vector<double> frame_weight(frames.size(), -1.0);  // -1 = no weight
    if (points.size() >= 2) {
        const auto kept = prefilter_center_box(points, params.prefilter_scale);
        std::vector<Vec2> cluster_input;
        const std::size_t stride = std::max<std::size_t>(1, kept.size() / params.cluster_max_points +
                                                                (kept.size() % params.cluster_max_points ? 1 : 0));
        for (std::size_t k = 0; k < kept.size(); k += stride) cluster_input.push_back(points[kept[k]]);
        if (cluster_input.size() >= 2) {
            // the NN estimate undersmooths dense hotspots; floor it at a
            // fraction of the point spread (recorded in run metadata)
            std::vector<double> xs, ys;
            for (const auto& p : cluster_input) {
                xs.push_back(p.x);
                ys.push_back(p.y);
            }
            const double iqr_x = percentile(xs, 0.75) - percentile(xs, 0.25);
            const double iqr_y = percentile(ys, 0.75) - percentile(ys, 0.25);
            result.bandwidth = std::max({estimate_bandwidth(cluster_input),
                                         params.bandwidth_iqr_factor * std::max(iqr_x, iqr_y), 1e-6});
            result.clusters = mean_shift(cluster_input, result.bandwidth);
        }
    }
    if (!result.clusters.empty()) {
        const VCCluster& vc = result.clusters.front();
        for (std::size_t k = 0; k < points.size(); ++k)
            frame_weight[point_frame[k]] = mahalanobis_weight(points[k], vc, params.weight);
    }

    for (const auto& w : windows) {
        std::size_t n_valid = 0;
        for (std::size_t idx : w.frame_indices) n_valid += validity[idx] ? 1u : 0u;
        if (n_valid < 2) {
            ++result.dropped_feature_rows;
            continue;
        }
        std::vector<double> weights;
        for (std::size_t idx : w.frame_indices)
            if (frame_weight[idx] >= 0.0) weights.push_back(frame_weight[idx]);
        const LookingnessVector look = lookingness_vector(weights);
        if (look.empty_window) ++result.zero_weight_windows;

        const auto gaze = gaze_feature_vector(frames, w.frame_indices, validity, AngularComponent::Gaze);
        const auto eye = gaze_feature_vector(frames, w.frame_indices, validity, AngularComponent::Eye);
        const auto head = head_feature_vector(frames, w.frame_indices, validity);
        WindowFeature wf;
        wf.center_ms = w.center_ms;
        wf.begin_ms = w.begin_ms;
        wf.end_ms = w.end_ms;
        wf.values = window_feature_vector(gaze, eye, head, look.values, params.glasses_flag);
        result.windows.push_back(std::move(wf));
    }
    return result;
}

json gazefeat(const json& options) {
    const std::string input = require_string(options, "input");
    const std::string out_path = require_string(options, "out");

    GazefeatParams params;
    params.window.window_ms = options.value("window_ms", std::int64_t(1500));
    params.window.center_stride_ms = options.value("center_stride_ms", std::int64_t(500));
    params.window.min_span_ms = options.value("min_span_ms", std::int64_t(500));
    params.window.max_invalid = options.value("max_invalid", 0.5);
    params.median_width = options.value("median_width", 5);
    if (options.value("eye_mode", std::string("subtraction")) == "rotation")
        params.eye_mode = EyeInHeadMode::RotationMatrix;
    if (options.value("weight_formula", std::string("repaired")) == "literal")
        params.weight.formula = WeightFormula::Literal;
    params.prefilter_scale = options.value("prefilter_scale", 3.0);
    params.bandwidth_iqr_factor = options.value("bandwidth_iqr_factor", 1.5);

    std::map<std::string, int> glasses;
    if (options.contains("glasses")) {
        CsvTable t = read_csv(options.at("glasses").get<std::string>());
        t.require_header({"subject_id", "glasses_flag"});
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            glasses[t.cell(i, 0)] = static_cast<int>(t.cell_int(i, 1));
    }

    CsvWriter w(out_path);
    std::vector<std::string> header = {"subject_id", "center_ms"};
    for (int j = 0; j < kWindowDim; ++j) header.push_back("f_" + std::to_string(j));
    w.header(header);

    std::unique_ptr<CsvWriter> diag;
    if (options.contains("diagnostics")) {
        diag = std::make_unique<CsvWriter>(options.at("diagnostics").get<std::string>());
        diag->header({"subject_id", "rank", "center_x", "center_y", "member_count", "bandwidth"});
    }

    json per_subject = json::array();
    std::int64_t total_windows = 0, total_candidates = 0, total_kept = 0;
    for (const auto& file : subject_files(input)) {
        const std::string subject = subject_of(file);
        auto frames = load_trajectories(file.string());
        GazefeatParams p = params;
        auto git = glasses.find(subject);
        if (git != glasses.end()) p.glasses_flag = git->second;
        SubjectWindows sw = extract_subject_windows(frames, subject, p);
        for (const auto& wf : sw.windows) {
            w.field(subject);
            w.field(wf.center_ms);
            for (double v : wf.values) w.field(v);
            w.end_row();
        }
        if (diag) {
            for (std::size_t r = 0; r < sw.clusters.size(); ++r) {
                diag->field(subject);
                diag->field(static_cast<std::int64_t>(r));
                diag->field(sw.clusters[r].center.x);
                diag->field(sw.clusters[r].center.y);
                diag->field(sw.clusters[r].member_count);
                diag->field(sw.bandwidth);
                diag->end_row();
            }
        }
        total_windows += static_cast<std::int64_t>(sw.windows.size());
        total_candidates += sw.window_stats.candidates;
        total_kept += sw.window_stats.kept;
        per_subject.push_back({{"subject", subject},
                               {"windows", sw.windows.size()},
                               {"window_candidates", sw.window_stats.candidates},
                               {"dropped_feature_rows", sw.dropped_feature_rows},
                               {"zero_weight_windows", sw.zero_weight_windows},
                               {"bandwidth", sw.bandwidth},
                               {"clusters", sw.clusters.size()}});
    }

    json sidecar;
    sidecar["columns"] = window_feature_names();
    sidecar["window_ms"] = params.window.window_ms;
    sidecar["center_stride_ms"] = params.window.center_stride_ms;
    sidecar["min_span_ms"] = params.window.min_span_ms;
    sidecar["max_invalid"] = params.window.max_invalid;
    sidecar["median_width"] = params.median_width;
    sidecar["median_edges"] = "symmetric truncation";
    sidecar["eye_mode"] = params.eye_mode == EyeInHeadMode::Subtraction ? "subtraction" : "rotation";
    sidecar["bandwidth_rule"] = "max(3 x median NN, " + format_double(params.bandwidth_iqr_factor) +
                                " x max-axis IQR, 1e-6)";
    sidecar["weight_formula"] =
        params.weight.formula == WeightFormula::Repaired ? "1 - d/thr2" : "(1 - d)/thr2";
    sidecar["per_subject"] = per_subject;
    write_json_file(sidecar, out_path + ".schema.json");

    json summary;
    summary["windows"] = total_windows;
    summary["window_candidates"] = total_candidates;
    summary["window_drop_rate"] =
        total_candidates ? 1.0 - static_cast<double>(total_kept) / static_cast<double>(total_candidates)
                         : 0.0;
    return summary;
}

}  // namespace affectfuse::pipeline
