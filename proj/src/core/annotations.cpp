#include "annotations.hpp"

#include <algorithm>
#include <unordered_map>

#include "csvio.hpp"
#include "errors.hpp"
#include "labels.hpp"

namespace affectfuse {

Rational parse_rational(const std::string& s) {
    auto parts = split(s, '/');
    Rational r;
    if (parts.size() == 1) {
        r.num = parse_int(parts[0], "fps");
        r.den = 1;
    } else if (parts.size() == 2) {
        r.num = parse_int(parts[0], "fps numerator");
        r.den = parse_int(parts[1], "fps denominator");
    } else {
        throw ValidationError("bad rational: '" + s + "'");
    }
    if (r.num <= 0 || r.den <= 0) throw ValidationError("fps must be positive: '" + s + "'");
    return r;
}

std::vector<std::string> events_to_ms_labels(const std::vector<AnnotationEvent>& events,
                                             std::int64_t session_length_ms) {
    std::vector<AnnotationEvent> sorted = events;
    std::sort(sorted.begin(), sorted.end(),
              [](const AnnotationEvent& a, const AnnotationEvent& b) { return a.start_ms < b.start_ms; });
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (sorted[i].end_ms > sorted[i + 1].start_ms)
            throw ValidationError("rater '" + sorted[i].rater_id + "': overlapping events [" +
                                  std::to_string(sorted[i].start_ms) + "," + std::to_string(sorted[i].end_ms) +
                                  ") and [" + std::to_string(sorted[i + 1].start_ms) + "," +
                                  std::to_string(sorted[i + 1].end_ms) + ")");
    }
    std::vector<std::string> ms(static_cast<std::size_t>(session_length_ms));
    for (const auto& ev : sorted) {
        if (ev.start_ms >= ev.end_ms)
            throw ValidationError("event with start >= end: [" + std::to_string(ev.start_ms) + "," +
                                  std::to_string(ev.end_ms) + ")");
        const std::int64_t lo = std::max<std::int64_t>(0, ev.start_ms);
        const std::int64_t hi = std::min<std::int64_t>(session_length_ms, ev.end_ms);
        for (std::int64_t t = lo; t < hi; ++t) ms[static_cast<std::size_t>(t)] = ev.label;
    }
    return ms;
}

namespace {

// modal label across raters for each millisecond; ties -> "" (unlabeled)
std::vector<std::string> combine_raters_ms(const std::vector<std::vector<std::string>>& rater_ms,
                                           std::int64_t session_length_ms) {
    std::vector<std::string> out(static_cast<std::size_t>(session_length_ms));
    std::unordered_map<std::string, int> votes;
    for (std::int64_t t = 0; t < session_length_ms; ++t) {
        votes.clear();
        for (const auto& r : rater_ms) {
            const std::string& l = r[static_cast<std::size_t>(t)];
            if (!l.empty()) ++votes[l];
        }
        if (votes.empty()) continue;
        int best = 0;
        bool tie = false;
        std::string winner;
        for (const auto& [label, n] : votes) {
            if (n > best) {
                best = n;
                winner = label;
                tie = false;
            } else if (n == best) {
                tie = true;
            }
        }
        if (!tie) out[static_cast<std::size_t>(t)] = winner;
    }
    return out;
}

}  // namespace

std::vector<AudioSegment> build_audio_gold(const std::string& subject_id,
                                           const std::vector<std::vector<AnnotationEvent>>& events_per_rater,
                                           std::int64_t session_length_ms,
                                           double majority_fraction) {
    if (events_per_rater.empty()) throw ValidationError("build_audio_gold: no raters");
    if (!(majority_fraction > 0.0 && majority_fraction <= 1.0))
        throw ValidationError("majority_fraction must be in (0, 1]");

    std::vector<std::vector<std::string>> rater_ms;
    rater_ms.reserve(events_per_rater.size());
    for (const auto& evs : events_per_rater)
        rater_ms.push_back(events_to_ms_labels(evs, session_length_ms));
    const std::vector<std::string> combined = combine_raters_ms(rater_ms, session_length_ms);

    std::vector<AudioSegment> segments;
    std::unordered_map<std::string, std::int64_t> tally;
    for (std::int64_t start = 0; start + kSegmentMs <= session_length_ms; start += kSegmentStrideMs) {
        tally.clear();
        std::int64_t labeled = 0;
        for (std::int64_t t = start; t < start + kSegmentMs; ++t) {
            const std::string& l = combined[static_cast<std::size_t>(t)];
            if (l.empty()) continue;
            ++tally[l];
            ++labeled;
        }
        AudioSegment seg;
        seg.subject_id = subject_id;
        seg.segment_index = static_cast<std::int64_t>(segments.size());
        seg.start_ms = start;
        seg.end_ms = start + kSegmentMs;
        if (labeled == 0) {
            seg.label = labels::kSilence;
        } else {
            std::int64_t best = 0;
            std::string winner;
            for (const auto& [label, n] : tally) {
                if (n > best || (n == best && label < winner)) {
                    best = n;
                    winner = label;
                }
            }
            const double coverage = static_cast<double>(best) / static_cast<double>(kSegmentMs);
            seg.label = coverage >= majority_fraction ? winner : labels::kDiscarded;
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::vector<AudioSegment> filter_avatar_overlap(const std::vector<AudioSegment>& segments,
                                                const std::vector<Interval>& avatar_speech,
                                                double max_overlap) {
    if (avatar_speech.empty()) return segments;
    std::vector<AudioSegment> kept;
    for (const auto& seg : segments) {
        std::int64_t covered = 0;
        for (const auto& iv : avatar_speech) {
            const std::int64_t lo = std::max(seg.start_ms, iv.start_ms);
            const std::int64_t hi = std::min(seg.end_ms, iv.end_ms);
            if (hi > lo) covered += hi - lo;
        }
        const double frac = static_cast<double>(covered) / static_cast<double>(seg.end_ms - seg.start_ms);
        if (frac <= max_overlap) kept.push_back(seg);
    }
    return kept;
}

FrameLabelTrack build_video_gold(const FrameLabelTrack& a, const FrameLabelTrack& b) {
    if (a.labels.size() != b.labels.size())
        throw ValidationError("build_video_gold: track lengths differ (" + std::to_string(a.labels.size()) +
                              " vs " + std::to_string(b.labels.size()) + ")");
    FrameLabelTrack out;
    out.subject_id = a.subject_id;
    out.fps = a.fps;
    out.labels.reserve(a.labels.size());
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        const std::string& la = a.labels[i].empty() ? labels::kVideoNeutral : a.labels[i];
        const std::string& lb = b.labels[i].empty() ? labels::kVideoNeutral : b.labels[i];
        out.labels.push_back(la == lb ? la : labels::kDiscarded);
    }
    return out;
}

double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) throw ValidationError("cohen_kappa: empty sequence");
    if (a.size() != b.size())
        throw ValidationError("cohen_kappa: length mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    const double n = static_cast<double>(a.size());
    std::unordered_map<std::string, std::int64_t> ca, cb;
    std::int64_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
        if (a[i] == b[i]) ++agree;
    }
    const double po = static_cast<double>(agree) / n;
    double pe = 0.0;
    for (const auto& [label, na] : ca) {
        auto it = cb.find(label);
        if (it != cb.end()) pe += (static_cast<double>(na) / n) * (static_cast<double>(it->second) / n);
    }
    if (pe >= 1.0) return 1.0;  // both tracks constant and identical
    return (po - pe) / (1.0 - pe);
}

ContingencyTable contingency_audio_video(const std::vector<AudioSegment>& segments,
                                         const FrameLabelTrack& frames,
                                         const std::vector<std::string>& keep_audio,
                                         const std::vector<std::string>& keep_video) {
    ContingencyTable table;
    table.audio_labels = keep_audio;
    table.video_labels = keep_video;
    table.counts.assign(keep_audio.size(), std::vector<std::int64_t>(keep_video.size(), 0));

    // frame timestamps from fps; precompute the first frame index >= t via
    // direct search per segment (segments are short)
    const std::int64_t n_frames = static_cast<std::int64_t>(frames.labels.size());
    std::unordered_map<std::string, std::int64_t> tally;
    for (const auto& seg : segments) {
        if (labels::index_of(keep_audio, seg.label) < 0) continue;
        tally.clear();
        std::int64_t usable = 0;
        // frame i is inside the segment iff start <= t(i) < end
        for (std::int64_t i = 0; i < n_frames; ++i) {
            const std::int64_t t = frames.fps.frame_ms(i);
            if (t < seg.start_ms) continue;
            if (t >= seg.end_ms) break;
            const std::string& l = frames.labels[static_cast<std::size_t>(i)];
            if (l == labels::kDiscarded || l.empty()) continue;
            ++tally[l];
            ++usable;
        }
        if (usable == 0) {
            ++table.skipped;
            continue;
        }
        std::int64_t best = 0;
        std::string modal;
        for (const auto& [label, n] : tally) {
            if (n > best || (n == best && label < modal)) {
                best = n;
                modal = label;
            }
        }
        const int col = labels::index_of(keep_video, modal);
        if (col < 0) {
            ++table.skipped;
            continue;
        }
        const int row = labels::index_of(keep_audio, seg.label);
        ++table.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
        ++table.total;
    }

    table.percent.assign(keep_audio.size(), std::vector<double>(keep_video.size(), 0.0));
    if (table.total > 0) {
        for (std::size_t r = 0; r < keep_audio.size(); ++r)
            for (std::size_t c = 0; c < keep_video.size(); ++c)
                table.percent[r][c] = 100.0 * static_cast<double>(table.counts[r][c]) /
                                      static_cast<double>(table.total);
    }
    return table;
}

ReduceResult reduce_classes(const std::vector<std::string>& row_labels,
                            const std::vector<std::string>& keep) {
    if (keep.empty()) throw ValidationError("reduce_classes: empty keep set");
    ReduceResult res;
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        if (labels::contains(keep, row_labels[i]))
            res.kept_indices.push_back(i);
        else
            ++res.dropped_by_label[row_labels[i]];
    }
    return res;
}

}  // namespace affectfuse
