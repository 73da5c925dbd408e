#include "sync.hpp"

#include <algorithm>
#include <cmath>

#include "csvio.hpp"
#include "errors.hpp"
#include "labels.hpp"

namespace affectfuse {

std::string ModalitySet::to_string() const {
    std::vector<std::string> parts;
    if (A) parts.push_back("A");
    if (F) parts.push_back("F");
    if (G) parts.push_back("G");
    return join(parts, "+");
}

ModalitySet ModalitySet::parse(const std::string& s) {
    ModalitySet m;
    for (const auto& part : split(s, ',')) {
        for (const auto& piece : split(part, '+')) {
            if (piece == "A" || piece == "a")
                m.A = true;
            else if (piece == "F" || piece == "f")
                m.F = true;
            else if (piece == "G" || piece == "g")
                m.G = true;
            else if (!piece.empty())
                throw ValidationError("unknown modality '" + piece + "' (expected A, F or G)");
        }
    }
    if (!m.A && !m.F && !m.G) throw ValidationError("no modalities requested");
    return m;
}

std::vector<double> segment_face_stats(const std::vector<const std::vector<double>*>& frames) {
    if (frames.empty()) throw ValidationError("segment_face_stats: no frames in segment");
    const std::size_t dim = frames[0]->size();
    for (const auto* f : frames)
        if (f->size() != dim) throw ValidationError("segment_face_stats: inconsistent frame widths");
    std::vector<double> out(2 * dim, 0.0);
    const double n = static_cast<double>(frames.size());
    for (const auto* f : frames)
        for (std::size_t j = 0; j < dim; ++j) out[j] += (*f)[j];
    for (std::size_t j = 0; j < dim; ++j) out[j] /= n;
    for (const auto* f : frames)
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = (*f)[j] - out[j];
            out[dim + j] += d * d;
        }
    for (std::size_t j = 0; j < dim; ++j) out[dim + j] = std::sqrt(out[dim + j] / n);
    return out;
}

std::optional<std::size_t> align_window_to_segment(const std::vector<WindowFeature>& windows,
                                                   const AudioSegment& segment) {
    const std::int64_t seg_center = (segment.start_ms + segment.end_ms) / 2;
    std::optional<std::size_t> best;
    std::int64_t best_dist = 0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const WindowFeature& w = windows[i];
        if (w.begin_ms < segment.start_ms || w.end_ms > segment.end_ms) continue;
        const std::int64_t dist = std::abs(w.center_ms - seg_center);
        if (!best || dist < best_dist) {
            best = i;
            best_dist = dist;
        }
    }
    return best;
}

std::optional<std::size_t> nearest_center(const std::vector<std::int64_t>& sorted_centers,
                                          std::int64_t t) {
    if (sorted_centers.empty()) return std::nullopt;
    auto it = std::lower_bound(sorted_centers.begin(), sorted_centers.end(), t);
    if (it == sorted_centers.begin()) return 0;
    if (it == sorted_centers.end()) return sorted_centers.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - sorted_centers.begin());
    const std::size_t lo = hi - 1;
    // ties go to the earlier center
    if (t - sorted_centers[lo] <= sorted_centers[hi] - t) return lo;
    return hi;
}

namespace {

struct BlockPlan {
    std::vector<std::string> names;
    std::vector<std::size_t> widths;
    std::size_t total = 0;
};

BlockPlan plan_blocks(const ModalitySet& m, LabelType label_type) {
    BlockPlan p;
    if (m.A) {
        p.names.push_back("A");
        p.widths.push_back(kEnrichedAudioDim);
    }
    if (m.F) {
        p.names.push_back("F");
        p.widths.push_back(label_type == LabelType::Audio ? kFaceSegmentDim : kFaceFrameDim);
    }
    if (m.G) {
        p.names.push_back("G");
        p.widths.push_back(kGazeWindowDim);
    }
    for (auto w : p.widths) p.total += w;
    return p;
}

// modal non-discarded video gold label among frames inside [start,end)
std::string modal_video_label(const SubjectData& s, std::int64_t start_ms, std::int64_t end_ms) {
    std::map<std::string, int> tally;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(s.video_gold.size()); ++i) {
        const std::int64_t t = s.fps.frame_ms(i);
        if (t < start_ms) continue;
        if (t >= end_ms) break;
        const std::string& l = s.video_gold[static_cast<std::size_t>(i)];
        if (l.empty() || l == labels::kDiscarded) continue;
        ++tally[l];
    }
    int best = 0;
    std::string winner;
    for (const auto& [label, n] : tally)
        if (n > best || (n == best && n > 0 && label < winner)) {
            best = n;
            winner = label;
        }
    return winner;
}

}  // namespace

SampleMatrix assemble_dataset(const std::vector<SubjectData>& subjects, const AssembleOptions& options) {
    AssembleOptions opt = options;
    if (opt.keep_audio.empty()) opt.keep_audio = labels::kAudioKeep;
    if (opt.keep_video.empty()) opt.keep_video = labels::kVideoKeep;
    if (!opt.modalities.A && !opt.modalities.F && !opt.modalities.G)
        throw ValidationError("assemble_dataset: no modalities requested");
    if (opt.label_type == LabelType::Audio && opt.speaking == SpeakingFilter::Silence)
        throw ValidationError("assemble_dataset: audio rows are speech by construction");

    const BlockPlan plan = plan_blocks(opt.modalities, opt.label_type);
    SampleMatrix matrix;
    matrix.label_type = opt.label_type;
    matrix.modalities = opt.modalities;
    matrix.speaking = opt.speaking;
    matrix.block_names = plan.names;
    matrix.block_widths = plan.widths;
    matrix.feature_dim = plan.total;

    std::vector<const SubjectData*> ordered;
    for (const auto& s : subjects) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const SubjectData* a, const SubjectData* b) { return a->subject_id < b->subject_id; });

    auto drop = [&](const std::string& reason) { ++matrix.retention.dropped_by_reason[reason]; };

    for (const SubjectData* sp : ordered) {
        const SubjectData& s = *sp;
        if (opt.label_type == LabelType::Audio) {
            for (const auto& seg : s.segments) {
                if (labels::index_of(opt.keep_audio, seg.label) < 0) continue;
                ++matrix.retention.candidates;
                SampleRow row;
                row.subject_id = s.subject_id;
                row.country = s.country;
                row.t_center_ms = (seg.start_ms + seg.end_ms) / 2;
                row.speaking = true;
                row.audio_label = seg.label;
                row.video_label = modal_video_label(s, seg.start_ms, seg.end_ms);
                row.features.reserve(plan.total);

                bool ok = true;
                if (opt.modalities.A) {
                    auto it = s.a_features.find(seg.segment_index);
                    if (it == s.a_features.end()) {
                        drop("missing_A");
                        ok = false;
                    } else {
                        row.features.insert(row.features.end(), it->second.begin(), it->second.end());
                    }
                }
                if (ok && opt.modalities.F) {
                    std::vector<const std::vector<double>*> in_segment;
                    for (auto it = s.face_frames.begin(); it != s.face_frames.end(); ++it) {
                        const std::int64_t t = s.fps.frame_ms(it->first);
                        if (t < seg.start_ms || t >= seg.end_ms) continue;
                        in_segment.push_back(&it->second);
                    }
                    if (in_segment.empty()) {
                        drop("no_face_frames_in_segment");
                        ok = false;
                    } else {
                        auto stats = segment_face_stats(in_segment);
                        row.features.insert(row.features.end(), stats.begin(), stats.end());
                    }
                }
                if (ok && opt.modalities.G) {
                    auto w = align_window_to_segment(s.windows, seg);
                    if (!w) {
                        drop("no_window_inside_segment");
                        ok = false;
                    } else {
                        const auto& vals = s.windows[*w].values;
                        row.features.insert(row.features.end(), vals.begin(), vals.end());
                    }
                }
                if (!ok) continue;
                if (row.features.size() != plan.total)
                    throw RuntimeError("assemble_dataset: row width " + std::to_string(row.features.size()) +
                                       ", expected " + std::to_string(plan.total));
                ++matrix.retention.emitted;
                matrix.rows.push_back(std::move(row));
            }
        } else {
            // frame-granularity rows
            std::vector<std::int64_t> window_centers;
            for (const auto& w : s.windows) window_centers.push_back(w.center_ms);
            std::vector<std::int64_t> segment_centers;
            for (const auto& seg : s.segments) segment_centers.push_back((seg.start_ms + seg.end_ms) / 2);
            const std::int64_t last_segment_end = s.segments.empty() ? 0 : s.segments.back().end_ms;

            for (std::int64_t i = 0; i < static_cast<std::int64_t>(s.video_gold.size()); ++i) {
                const std::string& label = s.video_gold[static_cast<std::size_t>(i)];
                if (labels::index_of(opt.keep_video, label) < 0) continue;
                ++matrix.retention.candidates;
                const std::int64_t t = s.fps.frame_ms(i);

                if (s.segments.empty() || t >= last_segment_end) {
                    drop("frame_beyond_last_segment");
                    continue;
                }
                const auto seg_idx = nearest_center(segment_centers, t);
                const AudioSegment& seg = s.segments[*seg_idx];
                const bool speaking = seg.label != labels::kSilence;
                if (opt.speaking == SpeakingFilter::Speech && !speaking) {
                    drop("speaking_filter");
                    continue;
                }
                if (opt.speaking == SpeakingFilter::Silence && speaking) {
                    drop("speaking_filter");
                    continue;
                }

                SampleRow row;
                row.subject_id = s.subject_id;
                row.country = s.country;
                row.t_center_ms = t;
                row.speaking = speaking;
                row.video_label = label;
                if (labels::index_of(opt.keep_audio, seg.label) >= 0) row.audio_label = seg.label;
                row.features.reserve(plan.total);

                bool ok = true;
                if (opt.modalities.A) {
                    auto it = s.a_features.find(seg.segment_index);
                    if (it == s.a_features.end()) {
                        drop("missing_A");
                        ok = false;
                    } else {
                        row.features.insert(row.features.end(), it->second.begin(), it->second.end());
                    }
                }
                if (ok && opt.modalities.F) {
                    auto it = s.face_frames.find(i);
                    if (it == s.face_frames.end()) {
                        drop("missing_face_frame");
                        ok = false;
                    } else {
                        row.features.insert(row.features.end(), it->second.begin(), it->second.end());
                    }
                }
                if (ok && opt.modalities.G) {
                    auto w = nearest_center(window_centers, t);
                    if (!w) {
                        drop("no_windows");
                        ok = false;
                    } else {
                        const auto& vals = s.windows[*w].values;
                        row.features.insert(row.features.end(), vals.begin(), vals.end());
                    }
                }
                if (!ok) continue;
                if (row.features.size() != plan.total)
                    throw RuntimeError("assemble_dataset: row width " + std::to_string(row.features.size()) +
                                       ", expected " + std::to_string(plan.total));
                ++matrix.retention.emitted;
                matrix.rows.push_back(std::move(row));
            }
        }
    }
    return matrix;
}

}  // namespace affectfuse
