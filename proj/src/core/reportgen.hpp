#pragma once

#include <string>
#include <vector>

#include "evaluation.hpp"

namespace affectfuse {

// One results table per experiment, columns ordered per-class accuracy then
// average (all as percentages with SEM), plus a combined all-experiments CSV.
void render_result_tables(const std::vector<EvalReport>& reports, const std::string& out_dir);

// Grouped bar chart per test country comparing the experiments' mean UAR
// with SEM whiskers. Returns the written file names. Output is byte-stable.
std::vector<std::string> render_country_charts(const std::vector<EvalReport>& reports,
                                               const std::string& out_dir);

}  // namespace affectfuse
