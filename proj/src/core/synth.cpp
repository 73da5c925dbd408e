#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "csvio.hpp"
#include "errors.hpp"
#include "labels.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace affectfuse {

void SyntheticSpec::validate() const {
    auto check_priors = [](const std::vector<double>& p, const std::string& name) {
        double sum = 0.0;
        for (double v : p) {
            if (v < 0.0) throw ValidationError("synth spec: negative prior in " + name);
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ValidationError("synth spec: " + name + " priors sum to " + format_double(sum) +
                                  ", expected 1");
    };
    if (audio_priors.size() != labels::kAudioEmotions.size())
        throw ValidationError("synth spec: audio_priors needs 5 entries");
    if (video_silence_priors.size() != 3)
        throw ValidationError("synth spec: video_silence_priors needs 3 entries");
    check_priors(audio_priors, "audio");
    check_priors(video_silence_priors, "video");
    if (effect_a < 0 || effect_f < 0 || effect_g < 0)
        throw ValidationError("synth spec: effect sizes must be >= 0");
    if (session_ms < 3000) throw ValidationError("synth spec: session must be at least 3000 ms");
    for (const auto& [country, n] : subjects_per_country) {
        if (!labels::contains(labels::kCountries, country))
            throw ValidationError("synth spec: unknown country '" + country + "'");
        if (n < 0) throw ValidationError("synth spec: negative subject count");
    }
    if (!(rater_disagreement >= 0.0 && rater_disagreement <= 1.0))
        throw ValidationError("synth spec: rater_disagreement must be in [0,1]");
}

namespace {

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SyntheticSpec SyntheticSpec::from_json_text(const std::string& text) {
    json j = json::parse(text);
    SyntheticSpec s;
    maybe_get(j, "subjects_per_country", s.subjects_per_country);
    maybe_get(j, "session_ms", s.session_ms);
    if (j.contains("fps")) s.fps = parse_rational(j.at("fps").get<std::string>());
    maybe_get(j, "audio_priors", s.audio_priors);
    maybe_get(j, "video_silence_priors", s.video_silence_priors);
    maybe_get(j, "effect_a", s.effect_a);
    maybe_get(j, "effect_f", s.effect_f);
    maybe_get(j, "effect_g", s.effect_g);
    maybe_get(j, "noise_sd", s.noise_sd);
    maybe_get(j, "rater_disagreement", s.rater_disagreement);
    maybe_get(j, "frame_dropout", s.frame_dropout);
    maybe_get(j, "vc_x", s.vc_x);
    maybe_get(j, "vc_y", s.vc_y);
    maybe_get(j, "hotspot_fraction", s.hotspot_fraction);
    maybe_get(j, "hotspot_sd", s.hotspot_sd);
    maybe_get(j, "write_avatar", s.write_avatar);
    maybe_get(j, "avatar_fraction", s.avatar_fraction);
    maybe_get(j, "embedding_dim", s.embedding_dim);
    maybe_get(j, "face_dim", s.face_dim);
    maybe_get(j, "seed", s.seed);
    s.validate();
    return s;
}

std::string SyntheticSpec::to_json_text() const {
    json j;
    j["subjects_per_country"] = subjects_per_country;
    j["session_ms"] = session_ms;
    j["fps"] = std::to_string(fps.num) + "/" + std::to_string(fps.den);
    j["audio_priors"] = audio_priors;
    j["video_silence_priors"] = video_silence_priors;
    j["effect_a"] = effect_a;
    j["effect_f"] = effect_f;
    j["effect_g"] = effect_g;
    j["noise_sd"] = noise_sd;
    j["rater_disagreement"] = rater_disagreement;
    j["frame_dropout"] = frame_dropout;
    j["vc_x"] = vc_x;
    j["vc_y"] = vc_y;
    j["hotspot_fraction"] = hotspot_fraction;
    j["hotspot_sd"] = hotspot_sd;
    j["write_avatar"] = write_avatar;
    j["avatar_fraction"] = avatar_fraction;
    j["embedding_dim"] = embedding_dim;
    j["face_dim"] = face_dim;
    j["seed"] = seed;
    return j.dump(2);
}

namespace {

struct Span {
    std::int64_t start = 0, end = 0;
    int cls = 0;  // index into the channel's emotion list
};

// audio timeline: speech spans with emotions separated by silence gaps
std::vector<Span> audio_timeline(const SyntheticSpec& spec, Rng& rng) {
    std::vector<Span> spans;
    std::int64_t t = static_cast<std::int64_t>(rng.uniform(200, 1200));
    while (t < spec.session_ms) {
        Span s;
        s.start = t;
        s.end = std::min<std::int64_t>(spec.session_ms, t + 2000 + static_cast<std::int64_t>(rng.below(4000)));
        s.cls = static_cast<int>(rng.weighted(spec.audio_priors));
        if (s.end - s.start >= 400) spans.push_back(s);
        t = s.end + 600 + static_cast<std::int64_t>(rng.below(2200));
    }
    return spans;
}

// video labels inherit from speech spans (calm->neutral, pleased->happy,
// puzzled->pensive, sad->sad, tense->other); silence stretches draw their
// own spans from the silence priors
constexpr int kAudioToVideo[5] = {0, 1, 2, 5, 6};

std::vector<Span> video_timeline(const SyntheticSpec& spec, const std::vector<Span>& audio, Rng& rng) {
    std::vector<Span> spans;
    std::int64_t t = 0;
    std::size_t next_audio = 0;
    while (t < spec.session_ms) {
        if (next_audio < audio.size() && t >= audio[next_audio].start) {
            spans.push_back({audio[next_audio].start, audio[next_audio].end,
                             kAudioToVideo[audio[next_audio].cls]});
            t = audio[next_audio].end;
            ++next_audio;
            continue;
        }
        const std::int64_t gap_end =
            next_audio < audio.size() ? audio[next_audio].start : spec.session_ms;
        Span s;
        s.start = t;
        s.end = std::min(gap_end, t + 1000 + static_cast<std::int64_t>(rng.below(3000)));
        const std::size_t pick = rng.weighted(spec.video_silence_priors);
        s.cls = pick == 0 ? 0 : (pick == 1 ? 1 : 2);  // neutral/happy/pensive
        spans.push_back(s);
        t = s.end;
    }
    return spans;
}

int class_at(const std::vector<Span>& spans, std::int64_t t, int fallback) {
    for (const auto& s : spans)
        if (s.start <= t && t < s.end) return s.cls;
    return fallback;
}

// per-class feature directions: distinct sparse patterns, unit magnitude
double pattern(int cls, int coord, int dim) {
    const int block = dim / 8;
    return (coord / std::max(1, block)) % 8 == cls % 8 ? 1.0 : 0.0;
}

struct ClassMotion {
    double yaw, pitch, eye_x, eye_y;
};

// class-conditioned gaze/head offsets (degrees per unit effect size)
const ClassMotion kMotion[7] = {
    {0.0, 0.0, 0.0, 0.0},    // neutral
    {1.0, -0.5, 0.8, 0.4},   // happy
    {-1.0, 0.5, -0.8, -0.4}, // pensive
    {0.5, 1.0, 0.0, 0.8},    // surprised
    {-0.5, -1.0, 0.4, -0.8}, // angry
    {0.3, -0.8, -0.4, 0.6},  // sad
    {-0.3, 0.8, 0.6, -0.6},  // other
};

void write_audio_annotations(const SyntheticSpec& spec, const std::string& path,
                             const std::vector<Span>& truth, Rng& rng) {
    CsvWriter w(path);
    w.header({"rater_id", "channel", "start_ms", "end_ms", "label"});
    const double jitter = spec.rater_disagreement * 400.0;
    for (int rater = 0; rater < 3; ++rater) {
        const std::string rid = "r" + std::to_string(rater + 1);
        std::int64_t prev_end = 0;
        for (const auto& s : truth) {
            std::int64_t a = s.start, b = s.end;
            if (jitter > 0) {
                a += static_cast<std::int64_t>(rng.uniform(-jitter, jitter));
                b += static_cast<std::int64_t>(rng.uniform(-jitter, jitter));
            }
            a = std::max(a, prev_end);
            b = std::min<std::int64_t>(b, spec.session_ms);
            if (b <= a) continue;
            int cls = s.cls;
            if (rng.uniform() < spec.rater_disagreement)
                cls = static_cast<int>(rng.below(labels::kAudioEmotions.size()));
            w.field(rid);
            w.field(std::string("audio"));
            w.field(a);
            w.field(b);
            w.field(labels::kAudioEmotions[static_cast<std::size_t>(cls)]);
            w.end_row();
            prev_end = b;
        }
    }
}

void write_video_annotations(const SyntheticSpec& spec, const std::string& path,
                             const std::string& subject, const std::vector<Span>& truth,
                             std::int64_t n_frames, Rng& rng) {
    CsvWriter w(path);
    w.metadata("fps", std::to_string(spec.fps.num) + "/" + std::to_string(spec.fps.den));
    w.header({"subject_id", "frame_idx", "label_rater_a", "label_rater_b"});
    for (std::int64_t i = 0; i < n_frames; ++i) {
        const std::int64_t t = spec.fps.frame_ms(i);
        const int cls = class_at(truth, t, 0);
        std::string la = cls == 0 ? "" : labels::kVideoEmotions[static_cast<std::size_t>(cls)];
        std::string lb = la;
        if (rng.uniform() < spec.rater_disagreement) {
            const int other = static_cast<int>(rng.below(labels::kVideoEmotions.size()));
            lb = other == 0 ? "" : labels::kVideoEmotions[static_cast<std::size_t>(other)];
        }
        w.field(subject);
        w.field(i);
        w.field(la);
        w.field(lb);
        w.end_row();
    }
}

void write_trajectories(const SyntheticSpec& spec, const std::string& path, const std::string& subject,
                        const std::vector<Span>& video_truth, std::int64_t n_frames, Rng& rng) {
    CsvWriter w(path);
    w.header({"subject_id", "frame_idx", "t_ms", "gaze_x", "gaze_y", "head_yaw", "head_pitch",
              "head_roll", "origin_x", "origin_y", "origin_z", "plane_x", "plane_y", "detected"});
    for (std::int64_t i = 0; i < n_frames; ++i) {
        const std::int64_t t = spec.fps.frame_ms(i);
        const int cls = class_at(video_truth, t, 0);
        const ClassMotion& m = kMotion[cls];
        const bool detected = rng.uniform() >= spec.frame_dropout;
        const double yaw = spec.effect_g * m.yaw + rng.normal(0, spec.noise_sd);
        const double pitch = spec.effect_g * m.pitch + rng.normal(0, spec.noise_sd);
        const double roll = rng.normal(0, spec.noise_sd);
        const double eye_x = 0.5 * spec.effect_g * m.eye_x + rng.normal(0, 0.5 * spec.noise_sd);
        const double eye_y = 0.5 * spec.effect_g * m.eye_y + rng.normal(0, 0.5 * spec.noise_sd);
        double px, py;
        if (rng.uniform() < spec.hotspot_fraction) {
            px = spec.vc_x + rng.normal(0, spec.hotspot_sd);
            py = spec.vc_y + rng.normal(0, spec.hotspot_sd);
        } else {
            px = rng.uniform(-3, 3);
            py = rng.uniform(-3, 3);
        }
        w.field(subject);
        w.field(i);
        w.field(t);
        w.field(yaw + eye_x);
        w.field(pitch + eye_y);
        w.field(yaw);
        w.field(pitch);
        w.field(roll);
        w.field(0.0);
        w.field(0.0);
        w.field(2.0);
        w.field(px);
        w.field(py);
        w.field(detected ? 1 : 0);
        w.end_row();
    }
}

// VAD labels derived from the categorical class
const char* kValenceOf[5] = {"neutral", "positive", "neutral", "negative", "negative"};
const char* kArousalOf[5] = {"neutral", "slightly_excited", "slightly_excited", "neutral", "excited"};
const char* kDominanceOf[5] = {"neither", "neither", "neither", "defensive", "defensive"};

void write_embeddings(const SyntheticSpec& spec, const std::string& path, const std::string& subject,
                      const std::vector<Span>& audio_truth, Rng& rng) {
    CsvWriter w(path);
    std::vector<std::string> header = {"subject_id", "segment_index", "valence", "arousal", "dominance"};
    for (int j = 0; j < spec.embedding_dim; ++j) header.push_back("e_" + std::to_string(j));
    w.header(header);
    std::int64_t index = 0;
    for (std::int64_t start = 0; start + kSegmentMs <= spec.session_ms; start += kSegmentStrideMs, ++index) {
        // majority true class over the segment, speech coverage
        std::int64_t cover[5] = {0, 0, 0, 0, 0};
        for (const auto& s : audio_truth) {
            const std::int64_t lo = std::max(start, s.start);
            const std::int64_t hi = std::min(start + kSegmentMs, s.end);
            if (hi > lo) cover[s.cls] += hi - lo;
        }
        std::int64_t total = 0, best = 0;
        int cls = 0;
        for (int c = 0; c < 5; ++c) {
            total += cover[c];
            if (cover[c] > best) {
                best = cover[c];
                cls = c;
            }
        }
        if (total == 0) continue;  // silent segment: no speech features
        w.field(subject);
        w.field(index);
        w.field(std::string(kValenceOf[cls]));
        w.field(std::string(kArousalOf[cls]));
        w.field(std::string(kDominanceOf[cls]));
        for (int j = 0; j < spec.embedding_dim; ++j)
            w.field(spec.effect_a * pattern(cls, j, spec.embedding_dim) + rng.normal(0, spec.noise_sd));
        w.end_row();
    }
}

void write_face_features(const SyntheticSpec& spec, const std::string& path, const std::string& subject,
                         const std::vector<Span>& video_truth, std::int64_t n_frames, Rng& rng) {
    CsvWriter w(path);
    std::vector<std::string> header = {"subject_id", "frame_idx"};
    for (int j = 0; j < spec.face_dim; ++j) header.push_back("f_" + std::to_string(j));
    w.header(header);
    for (std::int64_t i = 0; i < n_frames; ++i) {
        if (rng.uniform() < spec.frame_dropout) continue;  // face not detected
        const int cls = class_at(video_truth, spec.fps.frame_ms(i), 0);
        w.field(subject);
        w.field(i);
        for (int j = 0; j < spec.face_dim; ++j)
            w.field(spec.effect_f * pattern(cls, j, spec.face_dim) + rng.normal(0, spec.noise_sd));
        w.end_row();
    }
}

void write_avatar_track(const SyntheticSpec& spec, const std::string& path,
                        const std::vector<Span>& audio_truth, Rng& rng) {
    CsvWriter w(path);
    w.header({"start_ms", "end_ms"});
    for (const auto& s : audio_truth) {
        if (rng.uniform() >= spec.avatar_fraction) continue;
        // avatar talks over the second half of the span
        const std::int64_t a = (s.start + s.end) / 2;
        w.field(a);
        w.field(s.end);
        w.end_row();
    }
}

}  // namespace

SynthResult synth_corpus(const SyntheticSpec& spec, const std::string& out_dir) {
    spec.validate();
    SynthResult result;
    const fs::path root(out_dir);
    for (const char* sub : {"annotations/audio", "annotations/video", "trajectories",
                            "embeddings/audio", "features/face", "avatar"}) {
        fs::create_directories(root / sub);
    }

    const std::int64_t n_frames = spec.session_ms * spec.fps.num / (1000 * spec.fps.den);
    json meta;
    meta["fps"] = std::to_string(spec.fps.num) + "/" + std::to_string(spec.fps.den);
    meta["session_ms"] = spec.session_ms;
    meta["seed"] = spec.seed;
    meta["vc_location"] = {spec.vc_x, spec.vc_y};
    meta["audio_labels"] = labels::kAudioEmotions;
    meta["video_labels"] = labels::kVideoEmotions;
    json subjects = json::array();

    std::uint64_t subject_stream = 0;
    Rng glasses_rng(split_seed(spec.seed, 0x91a55));
    CsvWriter glasses((root / "glasses.csv").string());
    glasses.header({"subject_id", "glasses_flag"});

    for (const auto& country : labels::kCountries) {
        auto it = spec.subjects_per_country.find(country);
        const int n_subjects = it == spec.subjects_per_country.end() ? 0 : it->second;
        for (int s = 0; s < n_subjects; ++s) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%s%02d", country.c_str(), s + 1);
            const std::string subject(buf);
            result.subject_ids.push_back(subject);
            subjects.push_back({{"id", subject}, {"country", country}});

            Rng rng(split_seed(spec.seed, 100 + subject_stream++));
            const auto audio = audio_timeline(spec, rng);
            const auto video = video_timeline(spec, audio, rng);

            const std::string a_path = (root / "annotations/audio" / (subject + ".csv")).string();
            write_audio_annotations(spec, a_path, audio, rng);
            const std::string v_path = (root / "annotations/video" / (subject + ".csv")).string();
            write_video_annotations(spec, v_path, subject, video, n_frames, rng);
            const std::string t_path = (root / "trajectories" / (subject + ".csv")).string();
            write_trajectories(spec, t_path, subject, video, n_frames, rng);
            const std::string e_path = (root / "embeddings/audio" / (subject + ".csv")).string();
            write_embeddings(spec, e_path, subject, audio, rng);
            const std::string f_path = (root / "features/face" / (subject + ".csv")).string();
            write_face_features(spec, f_path, subject, video, n_frames, rng);
            result.files_written.insert(result.files_written.end(),
                                        {a_path, v_path, t_path, e_path, f_path});
            if (spec.write_avatar) {
                const std::string av_path = (root / "avatar" / (subject + ".csv")).string();
                write_avatar_track(spec, av_path, audio, rng);
                result.files_written.push_back(av_path);
            }
            glasses.field(subject);
            glasses.field(static_cast<std::int64_t>(glasses_rng.below(3)));
            glasses.end_row();
        }
    }

    meta["subjects"] = subjects;
    meta["spec"] = json::parse(spec.to_json_text());
    std::ofstream meta_out(root / "meta.json");
    meta_out << meta.dump(2) << "\n";
    result.files_written.push_back((root / "meta.json").string());
    result.files_written.push_back((root / "glasses.csv").string());
    return result;
}

}  // namespace affectfuse
