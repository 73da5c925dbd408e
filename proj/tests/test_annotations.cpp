#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/annotations.hpp"
#include "core/errors.hpp"
#include "core/labels.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace affectfuse;

namespace {

AnnotationEvent ev(const std::string& rater, std::int64_t a, std::int64_t b, const std::string& label) {
    AnnotationEvent e;
    e.rater_id = rater;
    e.channel = Channel::Audio;
    e.start_ms = a;
    e.end_ms = b;
    e.label = label;
    return e;
}

}  // namespace

TEST_CASE("audio gold: single rater full-span label") {
    auto segs = build_audio_gold("s", {{ev("r1", 0, 3000, "calm")}}, 3000, 0.5);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].label == "calm");
    CHECK(segs[0].start_ms == 0);
    CHECK(segs[0].end_ms == 3000);
}

TEST_CASE("audio gold: majority fraction picks the dominant label") {
    // pleased 1400 ms < half, calm 1600 ms >= half
    auto segs = build_audio_gold(
        "s", {{ev("r1", 0, 1400, "pleased"), ev("r1", 1400, 3000, "calm")}}, 3000, 0.5);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].label == "calm");
}

TEST_CASE("audio gold: three-way split is discarded") {
    auto segs = build_audio_gold(
        "s", {{ev("r1", 0, 1000, "pleased"), ev("r1", 1000, 2000, "puzzled"), ev("r1", 2000, 3000, "calm")}},
        3000, 0.5);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].label == "discarded");
}

TEST_CASE("audio gold: unannotated segment is silence") {
    auto segs = build_audio_gold("s", {{ev("r1", 4000, 5000, "calm")}}, 5000, 0.5);
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].label == "silence");  // [0,3000) has no annotation
}

TEST_CASE("audio gold: overlapping events within one rater rejected") {
    CHECK_THROWS_AS(build_audio_gold("s", {{ev("r1", 0, 2000, "calm"), ev("r1", 1500, 3000, "sad")}},
                                     3000, 0.5),
                    ValidationError);
}

TEST_CASE("audio gold: segment count formula") {
    for (std::int64_t len : {3000, 3500, 4000, 10000, 60000}) {
        auto segs = build_audio_gold("s", {{ev("r1", 0, len, "calm")}}, len, 0.5);
        CHECK((std::int64_t)segs.size() == (len - 3000) / 1000 + 1);
    }
    CHECK(build_audio_gold("s", {{}}, 2999, 0.5).empty());
}

TEST_CASE("audio gold: fuzzed segments agree with the per-ms oracle") {
    Rng rng(11);
    const std::vector<std::string> vocab = {"calm", "pleased", "puzzled", "sad", "tense"};
    for (int trial = 0; trial < 40; ++trial) {
        const std::int64_t session = 8000 + (std::int64_t)rng.below(8) * 1000;
        const int n_raters = 1 + (int)rng.below(3);
        std::vector<std::vector<AnnotationEvent>> events(n_raters);
        std::vector<std::vector<oracle::Span>> spans(n_raters);
        for (int r = 0; r < n_raters; ++r) {
            std::int64_t t = 0;
            while (t < session) {
                std::int64_t gap = (std::int64_t)rng.below(1200);
                std::int64_t len = 300 + (std::int64_t)rng.below(2500);
                std::int64_t a = t + gap, b = std::min(session, a + len);
                if (b <= a) break;
                const std::string& label = vocab[rng.below(vocab.size())];
                events[r].push_back(ev("r" + std::to_string(r), a, b, label));
                spans[r].push_back({a, b, label});
                t = b;
            }
        }
        auto segs = build_audio_gold("s", events, session, 0.5);
        for (const auto& s : segs) {
            CHECK(s.label == oracle::segment_label(spans, s.start_ms, 0.5));
        }
    }
}

TEST_CASE("avatar overlap filter keeps segments covered at most one third") {
    auto segs = build_audio_gold("s", {{ev("r1", 0, 6000, "calm")}}, 6000, 0.5);
    REQUIRE(segs.size() == 4);
    // segments 0 and 1 are covered exactly 1/3 (1000 ms each) -> kept;
    // segments 2 and 3 are covered 1200 ms (40%) -> dropped
    auto kept = filter_avatar_overlap(segs, {{0, 1000}, {3000, 4200}});
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].segment_index == 0);
    CHECK(kept[1].segment_index == 1);
}

TEST_CASE("video gold: intersection and discards") {
    FrameLabelTrack a{"s", {25, 1}, {"happy", "happy"}};
    FrameLabelTrack b{"s", {25, 1}, {"happy", "pensive"}};
    auto gold = build_video_gold(a, b);
    REQUIRE(gold.labels.size() == 2);
    CHECK(gold.labels[0] == "happy");
    CHECK(gold.labels[1] == "discarded");
}

TEST_CASE("video gold: identical tracks pass through") {
    FrameLabelTrack a{"s", {25, 1}, {"neutral", "pensive", "happy", "neutral"}};
    auto gold = build_video_gold(a, a);
    CHECK(gold.labels == a.labels);
}

TEST_CASE("video gold: both unlabeled means neutral") {
    FrameLabelTrack a{"s", {25, 1}, {"", "happy", ""}};
    FrameLabelTrack b{"s", {25, 1}, {"", "", ""}};
    auto gold = build_video_gold(a, b);
    CHECK(gold.labels[0] == "neutral");
    CHECK(gold.labels[1] == "discarded");  // happy vs implicit neutral
    CHECK(gold.labels[2] == "neutral");
}

TEST_CASE("video gold: length mismatch rejected") {
    FrameLabelTrack a{"s", {25, 1}, {"happy"}};
    FrameLabelTrack b{"s", {25, 1}, {"happy", "happy"}};
    CHECK_THROWS_WITH_AS(build_video_gold(a, b), doctest::Contains("1 vs 2"), ValidationError);
}

TEST_CASE("kappa: perfect, independent, and degenerate cases") {
    std::vector<std::string> a = {"x", "x", "y", "y"};
    CHECK(cohen_kappa(a, a) == doctest::Approx(1.0));
    std::vector<std::string> b = {"x", "y", "x", "y"};
    CHECK(cohen_kappa(a, b) == doctest::Approx(0.0));
    std::vector<std::string> c = {"x", "x", "x", "x"};
    CHECK(cohen_kappa(c, c) == doctest::Approx(1.0));  // p_e = 1 convention
    CHECK_THROWS_AS(cohen_kappa({}, {}), ValidationError);
}

TEST_CASE("kappa: symmetric on random tracks") {
    Rng rng(5);
    const std::vector<std::string> vocab = {"a", "b", "c"};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> a, b;
        for (int i = 0; i < 50; ++i) {
            a.push_back(vocab[rng.below(3)]);
            b.push_back(vocab[rng.below(3)]);
        }
        CHECK(cohen_kappa(a, b) == doctest::Approx(cohen_kappa(b, a)));
    }
}

TEST_CASE("contingency: single segment, all frames neutral") {
    std::vector<AudioSegment> segs = {{"s", 0, 0, 3000, "calm"}};
    FrameLabelTrack frames{"s", {25, 1}, std::vector<std::string>(75, "neutral")};
    auto table = contingency_audio_video(segs, frames, labels::kAudioKeep, labels::kVideoKeep);
    CHECK(table.total == 1);
    CHECK(table.percent[0][0] == doctest::Approx(100.0));
    CHECK(table.skipped == 0);
}

TEST_CASE("contingency: two segments split 50/50") {
    std::vector<AudioSegment> segs = {{"s", 0, 0, 3000, "calm"}, {"s", 1, 3000, 6000, "calm"}};
    std::vector<std::string> lbl(150, "neutral");
    for (int i = 75; i < 150; ++i) lbl[(size_t)i] = "pensive";
    FrameLabelTrack frames{"s", {25, 1}, lbl};
    auto table = contingency_audio_video(segs, frames, labels::kAudioKeep, labels::kVideoKeep);
    CHECK(table.total == 2);
    CHECK(table.percent[0][0] == doctest::Approx(50.0));
    CHECK(table.percent[0][2] == doctest::Approx(50.0));
}

TEST_CASE("contingency: segment beyond the video is skipped and counted") {
    std::vector<AudioSegment> segs = {{"s", 0, 0, 3000, "calm"}, {"s", 5, 5000, 8000, "calm"}};
    FrameLabelTrack frames{"s", {25, 1}, std::vector<std::string>(75, "neutral")};  // 3 s of video
    auto table = contingency_audio_video(segs, frames, labels::kAudioKeep, labels::kVideoKeep);
    CHECK(table.total == 1);
    CHECK(table.skipped == 1);
}

TEST_CASE("contingency: counts sum to non-skipped segments before percentages") {
    Rng rng(7);
    const std::vector<std::string> vlabels = {"neutral", "happy", "pensive", "discarded"};
    std::vector<std::string> lbl;
    for (int i = 0; i < 500; ++i) lbl.push_back(vlabels[rng.below(vlabels.size())]);
    FrameLabelTrack frames{"s", {25, 1}, lbl};  // 20 s
    std::vector<AudioSegment> segs;
    for (int k = 0; k < 18; ++k)
        segs.push_back({"s", k, k * 1000, k * 1000 + 3000, k % 3 == 0 ? "pleased" : "calm"});
    auto table = contingency_audio_video(segs, frames, labels::kAudioKeep, labels::kVideoKeep);
    std::int64_t cells = 0;
    for (const auto& row : table.counts)
        for (auto v : row) cells += v;
    CHECK(cells == table.total);
    CHECK(table.total + table.skipped == (std::int64_t)segs.size());
}

TEST_CASE("reduce_classes keeps the requested labels and reports drops") {
    std::vector<std::string> rows = {"calm", "sad", "pleased", "tense", "puzzled", "discarded", "silence"};
    auto res = reduce_classes(rows, labels::kAudioKeep);
    CHECK(res.kept_indices == std::vector<std::size_t>{0, 2, 4});
    CHECK(res.dropped_by_label.at("sad") == 1);
    CHECK(res.dropped_by_label.at("discarded") == 1);

    auto all = reduce_classes(rows, {"calm", "sad", "pleased", "tense", "puzzled", "discarded", "silence"});
    CHECK(all.kept_indices.size() == rows.size());

    std::vector<std::string> video = {"neutral", "surprised", "happy", "angry", "sad", "other",
                                      "pensive", "discarded"};
    auto vres = reduce_classes(video, labels::kVideoKeep);
    CHECK(vres.kept_indices == std::vector<std::size_t>{0, 2, 6});
}

TEST_CASE("per-segment winning coverage satisfies the majority fraction") {
    Rng rng(23);
    const std::vector<std::string> vocab = {"calm", "pleased", "puzzled"};
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<AnnotationEvent> events;
        std::int64_t t = 0;
        const std::int64_t session = 20000;
        while (t < session) {
            std::int64_t len = 500 + (std::int64_t)rng.below(3000);
            std::int64_t b = std::min(session, t + len);
            events.push_back(ev("r", t, b, vocab[rng.below(3)]));
            t = b + (std::int64_t)rng.below(800);
        }
        auto segs = build_audio_gold("s", {events}, session, 0.5);
        auto ms = events_to_ms_labels(events, session);
        for (const auto& s : segs) {
            if (s.label == "discarded" || s.label == "silence") continue;
            std::int64_t n = 0;
            for (std::int64_t k = s.start_ms; k < s.end_ms; ++k)
                if (ms[(size_t)k] == s.label) ++n;
            CHECK((double)n / 3000.0 >= 0.5);
        }
    }
}
