#pragma once

// internal helpers shared by the pipeline stage translation units
#include <filesystem>
#include <fstream>

#include "csvio.hpp"
#include "errors.hpp"
#include "pipeline.hpp"

namespace affectfuse::pipeline::detail {

inline std::string require_string(const json& options, const char* key) {
    if (!options.contains(key))
        throw ValidationError(std::string("missing required option '") + key + "'");
    return options.at(key).get<std::string>();
}

// subject csv files of a directory, sorted; a lone file path means one subject
inline std::vector<std::filesystem::path> subject_files(const std::string& input) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    fs::path p(input);
    if (fs::is_directory(p)) {
        for (const auto& entry : fs::directory_iterator(p))
            if (entry.path().extension() == ".csv") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else if (fs::exists(p)) {
        files.push_back(p);
    } else {
        throw ValidationError("input not found: " + input);
    }
    return files;
}

inline std::string subject_of(const std::filesystem::path& file) { return file.stem().string(); }

inline SpeakingFilter parse_speaking(const std::string& s) {
    if (s == "all") return SpeakingFilter::All;
    if (s == "speech") return SpeakingFilter::Speech;
    if (s == "silence") return SpeakingFilter::Silence;
    throw ValidationError("speaking filter must be all|speech|silence, got '" + s + "'");
}

inline LabelType parse_label_type(const std::string& s) {
    if (s == "audio") return LabelType::Audio;
    if (s == "video") return LabelType::Video;
    throw ValidationError("label type must be audio|video, got '" + s + "'");
}

inline std::vector<int> parse_arch(const json& a) {
    std::vector<int> widths;
    if (a.is_string()) {
        for (const auto& part : split(a.get<std::string>(), '-'))
            widths.push_back(static_cast<int>(parse_int(part, "arch")));
    } else {
        widths = a.get<std::vector<int>>();
    }
    if (widths.empty()) throw ValidationError("empty architecture");
    for (int w : widths)
        if (w <= 0) throw ValidationError("architecture widths must be positive");
    return widths;
}

inline void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeError("cannot write " + path);
    out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    return json::parse(in, nullptr, true, true);
}

}  // namespace affectfuse::pipeline::detail
