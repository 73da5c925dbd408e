#include "reportgen.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "csvio.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace affectfuse {

namespace {

std::string title_case(const std::string& s) {
    if (s.empty()) return s;
    std::string out = s;
    out[0] = static_cast<char>(std::toupper(out[0]));
    return out;
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
    return buf;
}

}  // namespace

void render_result_tables(const std::vector<EvalReport>& reports, const std::string& out_dir) {
    // combined table, one row per experiment
    CsvWriter combined((fs::path(out_dir) / "results.csv").string());
    bool header_written = false;
    for (const auto& r : reports) {
        std::vector<std::string> header = {"experiment", "label_type",    "modality",
                                           "train",      "test",          "speaking_train",
                                           "speaking_test", "arch"};
        for (const auto& c : r.classes) {
            header.push_back(title_case(c) + " Accuracy");
            header.push_back(title_case(c) + " SEM");
        }
        header.push_back("Average Accuracy");
        header.push_back("Average SEM");
        if (!header_written) {
            combined.header(header);
            header_written = true;
        }
        combined.field(r.id);
        combined.field(r.label_type);
        combined.field(r.modalities);
        combined.field(r.train_country);
        combined.field(r.test_country);
        combined.field(r.speaking_train);
        combined.field(r.speaking_test);
        std::string arch;
        for (std::size_t i = 0; i < r.arch.size(); ++i)
            arch += (i ? "-" : "") + std::to_string(r.arch[i]);
        combined.field(arch);
        for (std::size_t c = 0; c < r.classes.size(); ++c) {
            combined.field(pct(r.per_class_recall_mean[c]));
            combined.field(pct(r.per_class_recall_sem[c]));
        }
        combined.field(pct(r.uar_mean));
        combined.field(pct(r.uar_sem));
        combined.end_row();
    }
}

std::vector<std::string> render_country_charts(const std::vector<EvalReport>& reports,
                                               const std::string& out_dir) {
    std::map<std::string, std::vector<const EvalReport*>> by_country;
    for (const auto& r : reports) by_country[r.test_country].push_back(&r);

    std::vector<std::string> written;
    for (const auto& [country, group] : by_country) {
        const int bar_w = 46, gap = 18, margin_left = 60, margin_bottom = 70, margin_top = 40;
        const int plot_h = 260;
        const int width = margin_left + static_cast<int>(group.size()) * (bar_w + gap) + gap + 20;
        const int height = margin_top + plot_h + margin_bottom;

        std::string svg;
        char buf[512];
        svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
               "\" height=\"" + std::to_string(height) + "\">\n";
        svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
                      "Average accuracy on %s</text>\n",
                      margin_left, country.c_str());
        svg += buf;

        // y axis with 0/25/50/75/100% gridlines
        for (int tick = 0; tick <= 4; ++tick) {
            const double frac = tick / 4.0;
            const int y = margin_top + plot_h - static_cast<int>(frac * plot_h);
            std::snprintf(buf, sizeof(buf),
                          "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#ddd\"/>\n"
                          "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                          "text-anchor=\"end\">%d%%</text>\n",
                          margin_left, y, width - 20, y, margin_left - 6, y + 4,
                          static_cast<int>(frac * 100));
            svg += buf;
        }

        const char* palette[] = {"#4878cf", "#6acc65", "#d65f5f", "#b47cc7", "#c4ad66", "#77bedb"};
        for (std::size_t i = 0; i < group.size(); ++i) {
            const EvalReport& r = *group[i];
            const int x = margin_left + gap + static_cast<int>(i) * (bar_w + gap);
            const int h = static_cast<int>(r.uar_mean * plot_h);
            const int y = margin_top + plot_h - h;
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n", x, y,
                          bar_w, h, palette[i % 6]);
            svg += buf;
            // SEM whisker
            const int cx = x + bar_w / 2;
            const int y_lo = margin_top + plot_h - static_cast<int>((r.uar_mean - r.uar_sem) * plot_h);
            const int y_hi = margin_top + plot_h - static_cast<int>((r.uar_mean + r.uar_sem) * plot_h);
            std::snprintf(buf, sizeof(buf),
                          "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                          "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                          "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                          cx, y_lo, cx, y_hi, cx - 5, y_lo, cx + 5, y_lo, cx - 5, y_hi, cx + 5, y_hi);
            svg += buf;
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                          "text-anchor=\"middle\">%s</text>\n"
                          "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"10\" "
                          "text-anchor=\"middle\" transform=\"rotate(30 %d %d)\">%s</text>\n",
                          cx, y - 4, pct(r.uar_mean).c_str(), cx, margin_top + plot_h + 16, cx,
                          margin_top + plot_h + 16, r.id.c_str());
            svg += buf;
        }
        svg += "</svg>\n";

        const std::string path = (fs::path(out_dir) / ("chart_" + country + ".svg")).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw RuntimeError("cannot write " + path);
        out << svg;
        written.push_back("chart_" + country + ".svg");
    }
    return written;
}

}  // namespace affectfuse
