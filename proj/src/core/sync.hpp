#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annotations.hpp"

namespace affectfuse {

inline constexpr int kFaceFrameDim = 256;
inline constexpr int kFaceSegmentDim = 512;
inline constexpr int kEnrichedAudioDim = 1031;
inline constexpr int kGazeWindowDim = 228;

enum class LabelType { Audio, Video };
enum class SpeakingFilter { All, Speech, Silence };

struct ModalitySet {
    bool A = false, F = false, G = false;
    std::string to_string() const;
    static ModalitySet parse(const std::string& s);  // "A,F,G" in any order
};

struct WindowFeature {
    std::int64_t center_ms = 0;
    std::int64_t begin_ms = 0, end_ms = 0;
    std::vector<double> values;  // 228
};

// Everything known about one subject, resolution-aligned inputs included.
struct SubjectData {
    std::string subject_id;
    std::string country;
    Rational fps;
    std::vector<AudioSegment> segments;              // audio gold, unreduced
    std::vector<std::string> video_gold;             // per frame; empty vector = absent
    std::map<std::int64_t, std::vector<double>> face_frames;  // frame_idx -> 256D
    std::vector<WindowFeature> windows;              // sorted by center
    std::map<std::int64_t, std::vector<double>> a_features;   // segment_index -> 1031D
};

// mean(256) || population SD(256) of the frames inside one audio segment
std::vector<double> segment_face_stats(const std::vector<const std::vector<double>*>& frames);

// Window eligible for a segment only when fully inside it; of those, the one
// whose center is nearest the segment center, ties to the earlier window.
std::optional<std::size_t> align_window_to_segment(const std::vector<WindowFeature>& windows,
                                                   const AudioSegment& segment);

// index of the nearest center to t; equidistant neighbours pick the earlier
std::optional<std::size_t> nearest_center(const std::vector<std::int64_t>& sorted_centers,
                                          std::int64_t t);

struct SampleRow {
    std::string subject_id;
    std::string country;
    std::int64_t t_center_ms = 0;
    bool speaking = true;
    std::string audio_label;  // empty when not attachable
    std::string video_label;
    std::vector<double> features;  // requested blocks concatenated in A,F,G order
};

struct RetentionStats {
    std::int64_t candidates = 0;
    std::int64_t emitted = 0;
    std::map<std::string, std::int64_t> dropped_by_reason;
    double fraction() const {
        return candidates ? static_cast<double>(emitted) / static_cast<double>(candidates) : 1.0;
    }
};

struct SampleMatrix {
    LabelType label_type = LabelType::Audio;
    ModalitySet modalities;
    SpeakingFilter speaking = SpeakingFilter::All;
    std::vector<std::string> block_names;   // e.g. {"A","F","G"}
    std::vector<std::size_t> block_widths;  // e.g. {1031,512,228}
    std::size_t feature_dim = 0;
    std::vector<SampleRow> rows;
    RetentionStats retention;
};

struct AssembleOptions {
    LabelType label_type = LabelType::Audio;
    ModalitySet modalities;
    SpeakingFilter speaking = SpeakingFilter::All;
    std::vector<std::string> keep_audio;  // defaults to calm/pleased/puzzled
    std::vector<std::string> keep_video;  // defaults to neutral/happy/pensive
};

// Audio rows are per gold segment (speech by construction); video rows are
// per gold frame. Rows missing any requested block are dropped and tallied.
SampleMatrix assemble_dataset(const std::vector<SubjectData>& subjects, const AssembleOptions& options);

}  // namespace affectfuse
