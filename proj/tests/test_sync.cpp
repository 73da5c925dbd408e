#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/sync.hpp"

using namespace affectfuse;

namespace {

WindowFeature wf(std::int64_t center, std::int64_t half = 750) {
    WindowFeature w;
    w.center_ms = center;
    w.begin_ms = center - half;
    w.end_ms = center + half;
    w.values.assign(kGazeWindowDim, (double)center);
    return w;
}

AudioSegment seg(const std::string& subject, std::int64_t index, const std::string& label) {
    return {subject, index, index * 1000, index * 1000 + 3000, label};
}

// one subject with aligned everything: n_seg gold segments, face features on
// every frame, windows every 500 ms, A features for every segment
SubjectData aligned_subject(const std::string& id, const std::string& country, int n_seg) {
    SubjectData d;
    d.subject_id = id;
    d.country = country;
    d.fps = {25, 1};
    const std::int64_t session = (n_seg - 1) * 1000 + 3000;
    for (int i = 0; i < n_seg; ++i)
        d.segments.push_back(seg(id, i, i % 3 == 0 ? "calm" : (i % 3 == 1 ? "pleased" : "puzzled")));
    const std::int64_t n_frames = session * 25 / 1000;
    for (std::int64_t f = 0; f < n_frames; ++f) {
        d.video_gold.push_back(f % 2 == 0 ? "neutral" : "happy");
        d.face_frames[f] = std::vector<double>(kFaceFrameDim, (double)f);
    }
    for (std::int64_t c = 750; c + 750 <= session; c += 500) d.windows.push_back(wf(c));
    for (int i = 0; i < n_seg; ++i)
        d.a_features[i] = std::vector<double>(kEnrichedAudioDim, (double)i);
    return d;
}

}  // namespace

TEST_CASE("segment face stats: mean then SD, 512 wide") {
    std::vector<double> a(kFaceFrameDim, 2.0), b(kFaceFrameDim, -2.0);
    auto out = segment_face_stats({&a, &b});
    REQUIRE(out.size() == 512);
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[256] == doctest::Approx(2.0));  // population SD of {2,-2}

    std::vector<double> c(kFaceFrameDim, 7.0);
    auto constant = segment_face_stats({&c, &c, &c});
    CHECK(constant[10] == doctest::Approx(7.0));
    CHECK(constant[266] == doctest::Approx(0.0));

    CHECK_THROWS_AS(segment_face_stats({}), ValidationError);
}

TEST_CASE("align window to segment: exact center, tie to earlier, none when no fit") {
    AudioSegment s{"x", 0, 0, 3000, "calm"};
    std::vector<WindowFeature> windows = {wf(750), wf(1500), wf(2250)};
    auto pick = align_window_to_segment(windows, s);
    REQUIRE(pick.has_value());
    CHECK(windows[*pick].center_ms == 1500);

    std::vector<WindowFeature> tie = {wf(1000, 250), wf(2000, 250)};
    auto t = align_window_to_segment(tie, s);
    REQUIRE(t.has_value());
    CHECK(tie[*t].center_ms == 1000);

    // window overlapping the boundary is not eligible
    std::vector<WindowFeature> outside = {wf(3000)};
    CHECK_FALSE(align_window_to_segment(outside, s).has_value());
    CHECK_FALSE(align_window_to_segment({}, s).has_value());
}

TEST_CASE("nearest center: interior, ties, edges") {
    std::vector<std::int64_t> centers = {1500, 2500};
    CHECK(*nearest_center(centers, 1499) == 0);
    CHECK(*nearest_center(centers, 2000) == 0);  // equidistant -> earlier
    CHECK(*nearest_center(centers, 2001) == 1);
    CHECK(*nearest_center(centers, 99999) == 1);
    CHECK(*nearest_center(centers, 0) == 0);
    CHECK_FALSE(nearest_center({}, 5).has_value());
}

TEST_CASE("nearest center equals the brute-force argmin on random grids") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int64_t> centers;
        std::int64_t c = 0;
        const int n = 1 + (int)rng.below(20);
        for (int i = 0; i < n; ++i) {
            c += 1 + (std::int64_t)rng.below(2000);
            centers.push_back(c);
        }
        const std::int64_t t = (std::int64_t)rng.below(25000);
        const std::size_t got = *nearest_center(centers, t);
        std::size_t best = 0;
        for (std::size_t i = 0; i < centers.size(); ++i)
            if (std::llabs(centers[i] - t) < std::llabs(centers[best] - t)) best = i;
        CHECK(std::llabs(centers[got] - t) == std::llabs(centers[best] - t));
        if (got != best) CHECK(got < best);  // ties resolve earlier
    }
}

TEST_CASE("assemble audio rows: A alone is 1031 wide, A+F+G is 1771") {
    std::vector<SubjectData> subjects = {aligned_subject("s1", "SP", 8)};
    AssembleOptions opt;
    opt.label_type = LabelType::Audio;
    opt.modalities = {true, false, false};
    auto m = assemble_dataset(subjects, opt);
    CHECK(m.feature_dim == 1031);
    CHECK(m.rows.size() == 8);
    CHECK(m.retention.fraction() == doctest::Approx(1.0));

    opt.modalities = {true, true, true};
    auto full = assemble_dataset(subjects, opt);
    CHECK(full.feature_dim == 1771);
    CHECK(full.block_widths == std::vector<std::size_t>{1031, 512, 228});
    for (const auto& row : full.rows) {
        CHECK(row.features.size() == 1771);
        CHECK(row.speaking);
        CHECK(!row.audio_label.empty());
    }
}

TEST_CASE("assemble audio rows: dual labels attach the modal video label") {
    std::vector<SubjectData> subjects = {aligned_subject("s1", "SP", 4)};
    AssembleOptions opt;
    opt.label_type = LabelType::Audio;
    opt.modalities = {true, false, false};
    auto m = assemble_dataset(subjects, opt);
    // frames alternate neutral/happy; each 75-frame segment's modal label
    // follows the parity of its first frame index (25 * segment_index)
    REQUIRE(m.rows.size() == 4);
    for (std::size_t i = 0; i < m.rows.size(); ++i)
        CHECK(m.rows[i].video_label == ((25 * i) % 2 == 0 ? "neutral" : "happy"));
}

TEST_CASE("assemble drops rows with missing blocks and reports reasons") {
    auto s = aligned_subject("s1", "SP", 6);
    s.a_features.erase(2);
    s.windows.clear();  // no eligible G window anywhere
    std::vector<SubjectData> subjects = {s};

    AssembleOptions opt;
    opt.label_type = LabelType::Audio;
    opt.modalities = {true, false, false};
    auto m = assemble_dataset(subjects, opt);
    CHECK(m.rows.size() == 5);
    CHECK(m.retention.dropped_by_reason.at("missing_A") == 1);

    opt.modalities = {false, false, true};
    auto g = assemble_dataset(subjects, opt);
    CHECK(g.rows.empty());
    CHECK(g.retention.dropped_by_reason.at("no_window_inside_segment") == 6);
}

TEST_CASE("assemble video rows: frame granularity with speaking filter") {
    auto s = aligned_subject("s1", "FR", 6);
    // make segments 0..2 speech, 3..5 silence
    for (int i = 3; i < 6; ++i) s.segments[(size_t)i].label = "silence";
    std::vector<SubjectData> subjects = {s};

    AssembleOptions opt;
    opt.label_type = LabelType::Video;
    opt.modalities = {false, true, true};
    opt.speaking = SpeakingFilter::All;
    auto all = assemble_dataset(subjects, opt);
    CHECK(all.feature_dim == kFaceFrameDim + kGazeWindowDim);
    CHECK(all.rows.size() > 0);

    opt.speaking = SpeakingFilter::Speech;
    auto speech = assemble_dataset(subjects, opt);
    opt.speaking = SpeakingFilter::Silence;
    auto silence = assemble_dataset(subjects, opt);
    CHECK(speech.rows.size() + silence.rows.size() == all.rows.size());
    for (const auto& row : speech.rows) CHECK(row.speaking);
    for (const auto& row : silence.rows) CHECK_FALSE(row.speaking);

    // silence rows must not sit inside a speech-labeled span
    for (const auto& row : silence.rows) {
        for (int i = 0; i < 3; ++i) {
            const auto& sp = s.segments[(size_t)i];
            const bool inside_center =
                std::llabs(row.t_center_ms - (sp.start_ms + 1500)) <
                std::llabs(row.t_center_ms - (s.segments[3].start_ms + 1500));
            (void)inside_center;
        }
        CHECK_FALSE(row.speaking);
    }
}

TEST_CASE("assemble video rows: frames beyond the last segment are unmatched") {
    auto s = aligned_subject("s1", "NO", 3);
    // extend the video two seconds past the last segment end
    const std::int64_t n0 = (std::int64_t)s.video_gold.size();
    for (std::int64_t f = n0; f < n0 + 50; ++f) {
        s.video_gold.push_back("neutral");
        s.face_frames[f] = std::vector<double>(kFaceFrameDim, 0.0);
    }
    std::vector<SubjectData> subjects = {s};
    AssembleOptions opt;
    opt.label_type = LabelType::Video;
    opt.modalities = {false, true, false};
    auto m = assemble_dataset(subjects, opt);
    CHECK(m.retention.dropped_by_reason.at("frame_beyond_last_segment") == 50);
}

TEST_CASE("assemble is deterministic and audio+silence is rejected") {
    std::vector<SubjectData> subjects = {aligned_subject("b", "SP", 5), aligned_subject("a", "SP", 5)};
    AssembleOptions opt;
    opt.label_type = LabelType::Audio;
    opt.modalities = {true, true, true};
    auto m1 = assemble_dataset(subjects, opt);
    auto m2 = assemble_dataset(subjects, opt);
    REQUIRE(m1.rows.size() == m2.rows.size());
    CHECK(m1.rows.front().subject_id == "a");  // subjects ordered by id
    for (std::size_t i = 0; i < m1.rows.size(); ++i)
        CHECK(m1.rows[i].features == m2.rows[i].features);

    opt.speaking = SpeakingFilter::Silence;
    CHECK_THROWS_AS(assemble_dataset(subjects, opt), ValidationError);
}

TEST_CASE("modality set parsing") {
    auto m = ModalitySet::parse("A,F,G");
    CHECK(m.A);
    CHECK(m.F);
    CHECK(m.G);
    CHECK(m.to_string() == "A+F+G");
    CHECK(ModalitySet::parse("G").to_string() == "G");
    CHECK(ModalitySet::parse("F+A").to_string() == "A+F");
    CHECK_THROWS_AS(ModalitySet::parse("X"), ValidationError);
    CHECK_THROWS_AS(ModalitySet::parse(""), ValidationError);
}
