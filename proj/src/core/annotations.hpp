#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace affectfuse {

enum class Channel { Audio, Video };

struct AnnotationEvent {
    std::string rater_id;
    Channel channel = Channel::Audio;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::string label;
};

struct AudioSegment {
    std::string subject_id;
    std::int64_t segment_index = 0;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;  // start_ms + kSegmentMs
    std::string label;        // emotion | "discarded" | "silence"
};

struct Rational {
    std::int64_t num = 25;
    std::int64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    // timestamp of frame i in ms, rounded to nearest integer
    std::int64_t frame_ms(std::int64_t i) const { return (i * 1000 * den + num / 2) / num; }
};

Rational parse_rational(const std::string& s);

struct FrameLabelTrack {
    std::string subject_id;
    Rational fps;
    std::vector<std::string> labels;
};

struct ContingencyTable {
    std::vector<std::string> audio_labels;  // rows
    std::vector<std::string> video_labels;  // cols
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::vector<double>> percent;  // over the grand total of kept cells
    std::int64_t total = 0;                    // kept (audio_label, modal_video) pairs
    std::int64_t skipped = 0;                  // segments with no usable frames in range
};

inline constexpr std::int64_t kSegmentMs = 3000;
inline constexpr std::int64_t kSegmentStrideMs = 1000;

// [start, end) avatar speech span
struct Interval {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

// Combine per-rater audio events into 3-s / 1-s-stride gold segments.
// Per-millisecond rater votes are merged by modal label (ties -> unlabeled);
// a segment takes the label covering >= majority_fraction of its 3000 ms,
// falls back to "discarded" when annotated but below threshold, and to
// "silence" when no rater annotated any millisecond of it.
std::vector<AudioSegment> build_audio_gold(const std::string& subject_id,
                                           const std::vector<std::vector<AnnotationEvent>>& events_per_rater,
                                           std::int64_t session_length_ms,
                                           double majority_fraction = 0.5);

// Drop segments where avatar speech covers more than max_overlap of the
// segment (kept when coverage <= max_overlap). No-op on empty track.
std::vector<AudioSegment> filter_avatar_overlap(const std::vector<AudioSegment>& segments,
                                                const std::vector<Interval>& avatar_speech,
                                                double max_overlap = 1.0 / 3.0);

// Intersection gold standard from two raters' frame tracks. Empty rater
// labels count as "neutral" before intersecting.
FrameLabelTrack build_video_gold(const FrameLabelTrack& a, const FrameLabelTrack& b);

double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Expand a rater's audio events to a per-ms label sequence ("" = unlabeled),
// used for ms-level kappa and shared with the gold-standard builder.
std::vector<std::string> events_to_ms_labels(const std::vector<AnnotationEvent>& events,
                                             std::int64_t session_length_ms);

ContingencyTable contingency_audio_video(const std::vector<AudioSegment>& segments,
                                         const FrameLabelTrack& frames,
                                         const std::vector<std::string>& keep_audio,
                                         const std::vector<std::string>& keep_video);

struct ReduceResult {
    std::vector<std::size_t> kept_indices;
    std::map<std::string, std::int64_t> dropped_by_label;
};

// Indices of labels inside `keep`, plus per-label counts of what was dropped.
ReduceResult reduce_classes(const std::vector<std::string>& row_labels,
                            const std::vector<std::string>& keep);

}  // namespace affectfuse
