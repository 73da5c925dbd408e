#pragma once

#include <string>
#include <vector>

namespace affectfuse {

// Label vocabularies. Kept as strings end to end; these tables define the
// order used whenever labels are encoded as class indices.
namespace labels {

// audio gold standard: five emotions plus the two bookkeeping outcomes
inline const std::vector<std::string> kAudioEmotions = {"calm", "pleased", "puzzled", "sad", "tense"};
inline const std::string kDiscarded = "discarded";
inline const std::string kSilence = "silence";

inline const std::vector<std::string> kVideoEmotions = {"neutral", "happy",   "pensive", "surprised",
                                                        "angry",   "sad",     "other"};
inline const std::string kVideoNeutral = "neutral";

// reduced sets used for classification (three most represented per channel)
inline const std::vector<std::string> kAudioKeep = {"calm", "pleased", "puzzled"};
inline const std::vector<std::string> kVideoKeep = {"neutral", "happy", "pensive"};

inline const std::vector<std::string> kValence = {"negative", "neutral", "positive"};
inline const std::vector<std::string> kArousal = {"neutral", "slightly_excited", "excited"};
inline const std::vector<std::string> kDominance = {"defensive", "neither", "dominant"};

inline const std::vector<std::string> kCountries = {"SP", "FR", "NO"};
inline const std::string kWhole = "WH";

inline bool contains(const std::vector<std::string>& set, const std::string& label) {
    for (const auto& s : set)
        if (s == label) return true;
    return false;
}

// index of label in set, or -1
inline int index_of(const std::vector<std::string>& set, const std::string& label) {
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set[i] == label) return static_cast<int>(i);
    return -1;
}

}  // namespace labels
}  // namespace affectfuse
