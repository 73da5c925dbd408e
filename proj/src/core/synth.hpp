#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "annotations.hpp"

namespace affectfuse {

// Knobs for the synthetic corpus. Class priors default to the published
// imbalance of the real recordings; effect sizes are per-modality class
// separations in units of the noise SD (0 = pure noise).
struct SyntheticSpec {
    std::map<std::string, int> subjects_per_country = {{"SP", 4}, {"FR", 3}, {"NO", 3}};
    std::int64_t session_ms = 60000;
    Rational fps{25, 1};

    // calm, pleased, puzzled, sad, tense
    std::vector<double> audio_priors = {0.9484, 0.0206, 0.0253, 0.0037, 0.0020};
    // neutral, happy, pensive during silence stretches
    std::vector<double> video_silence_priors = {0.90, 0.03, 0.07};

    double effect_a = 3.0;
    double effect_f = 3.0;
    double effect_g = 3.0;
    double noise_sd = 1.0;

    double rater_disagreement = 0.0;  // label flips + boundary jitter
    double frame_dropout = 0.02;      // probability a frame has no face/gaze estimate

    double vc_x = 0.4, vc_y = 0.2;    // planted gaze hotspot on the camera plane
    double hotspot_fraction = 0.8;
    double hotspot_sd = 0.15;

    bool write_avatar = false;
    double avatar_fraction = 0.15;    // fraction of speech spans the avatar talks over

    int embedding_dim = 1024;
    int face_dim = 256;
    std::uint64_t seed = 1;

    void validate() const;
    static SyntheticSpec from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct SynthResult {
    std::vector<std::string> subject_ids;
    std::vector<std::string> files_written;
};

// Writes the whole corpus layout under out_dir: per-rater annotations for
// both channels, trajectories, embeddings, face features, glasses flags and
// meta.json. Deterministic for a given spec + seed.
SynthResult synth_corpus(const SyntheticSpec& spec, const std::string& out_dir);

}  // namespace affectfuse
