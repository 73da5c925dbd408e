#include "functionals.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace affectfuse {

double percentile(std::vector<double> sorted_copy, double q) {
    std::sort(sorted_copy.begin(), sorted_copy.end());
    const std::size_t n = sorted_copy.size();
    if (n == 1) return sorted_copy[0];
    const double h = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted_copy[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted_copy[lo] + frac * (sorted_copy[lo + 1] - sorted_copy[lo]);
}

FunctionalSet functionals_full(const std::vector<double>& series) {
    if (series.empty()) throw ValidationError("functionals: empty series");
    FunctionalSet f;
    const std::size_t n = series.size();
    f.min = series[0];
    f.max = series[0];
    double sum = 0.0;
    for (double v : series) {
        f.min = std::min(f.min, v);
        f.max = std::max(f.max, v);
        sum += v;
    }
    f.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : series) ss += (v - f.mean) * (v - f.mean);
    f.sd = std::sqrt(ss / static_cast<double>(n));
    f.range = f.max - f.min;
    std::vector<double> sorted = series;
    std::sort(sorted.begin(), sorted.end());
    auto interp = [&](double q) {
        if (n == 1) return sorted[0];
        const double h = q * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= n) return sorted[n - 1];
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    };
    f.p25 = interp(0.25);
    f.p50 = interp(0.50);
    f.p75 = interp(0.75);
    f.iqr = f.p75 - f.p25;
    return f;
}

namespace {

struct AngularSeries {
    std::vector<double> x, y;          // per valid frame
    std::vector<double> dx, dy;        // signed diffs between consecutive valid frames
    std::vector<double> adx, ady;      // |dx|, |dy|
    std::vector<double> dv;            // sqrt(dx^2 + dy^2)
    std::vector<double> sx, sy, sv;    // |dx|/t, |dy|/t, |dv|/t  (deg/s)
};

AngularSeries collect_2d(const std::vector<TrajectoryFrame>& frames,
                         const std::vector<std::size_t>& window_frames,
                         const std::vector<bool>& validity, bool eye) {
    AngularSeries s;
    double prev_x = 0, prev_y = 0;
    std::int64_t prev_t = 0;
    bool have_prev = false;
    for (std::size_t idx : window_frames) {
        if (!validity[idx]) continue;
        const TrajectoryFrame& f = frames[idx];
        const double x = eye ? f.eye_x : f.gaze_x;
        const double y = eye ? f.eye_y : f.gaze_y;
        s.x.push_back(x);
        s.y.push_back(y);
        if (have_prev) {
            const double dt = static_cast<double>(f.t_ms - prev_t) / 1000.0;
            const double dx = x - prev_x, dy = y - prev_y;
            const double dv = std::hypot(dx, dy);
            s.dx.push_back(dx);
            s.dy.push_back(dy);
            s.adx.push_back(std::abs(dx));
            s.ady.push_back(std::abs(dy));
            s.dv.push_back(dv);
            s.sx.push_back(std::abs(dx) / dt);
            s.sy.push_back(std::abs(dy) / dt);
            s.sv.push_back(dv / dt);
        }
        prev_x = x;
        prev_y = y;
        prev_t = f.t_ms;
        have_prev = true;
    }
    return s;
}

template <std::size_t N>
void append(std::vector<double>& out, const std::array<double, N>& a) {
    out.insert(out.end(), a.begin(), a.end());
}

}  // namespace

std::vector<double> gaze_feature_vector(const std::vector<TrajectoryFrame>& frames,
                                        const std::vector<std::size_t>& window_frames,
                                        const std::vector<bool>& validity, AngularComponent component) {
    AngularSeries s = collect_2d(frames, window_frames, validity, component == AngularComponent::Eye);
    if (s.x.size() < 2)
        throw ValidationError("gaze_feature_vector: fewer than 2 valid frames in window");
    std::vector<double> out;
    out.reserve(kGazeDim);
    append(out, functionals_full(s.x).full());
    append(out, functionals_full(s.y).full());
    append(out, functionals_full(s.sx).full());
    append(out, functionals_full(s.sy).full());
    append(out, functionals_full(s.sv).full());
    append(out, functionals_full(s.adx).no_range());
    append(out, functionals_full(s.ady).no_range());
    append(out, functionals_full(s.dx).mean_sd());
    append(out, functionals_full(s.dy).mean_sd());
    append(out, functionals_full(s.dv).mean_sd());
    if (static_cast<int>(out.size()) != kGazeDim)
        throw RuntimeError("gaze feature vector is " + std::to_string(out.size()) + "D, expected 67");
    return out;
}

std::vector<double> head_feature_vector(const std::vector<TrajectoryFrame>& frames,
                                        const std::vector<std::size_t>& window_frames,
                                        const std::vector<bool>& validity) {
    std::vector<double> yaw, pitch, roll;
    std::vector<double> dyaw, dpitch, droll, ayaw, apitch, aroll, syaw, spitch, sroll;
    double py = 0, pp = 0, pr = 0;
    std::int64_t pt = 0;
    bool have_prev = false;
    for (std::size_t idx : window_frames) {
        if (!validity[idx]) continue;
        const TrajectoryFrame& f = frames[idx];
        yaw.push_back(f.head_yaw);
        pitch.push_back(f.head_pitch);
        roll.push_back(f.head_roll);
        if (have_prev) {
            const double dt = static_cast<double>(f.t_ms - pt) / 1000.0;
            const double dy = f.head_yaw - py, dp = f.head_pitch - pp, dr = f.head_roll - pr;
            dyaw.push_back(dy);
            dpitch.push_back(dp);
            droll.push_back(dr);
            ayaw.push_back(std::abs(dy));
            apitch.push_back(std::abs(dp));
            aroll.push_back(std::abs(dr));
            syaw.push_back(std::abs(dy) / dt);
            spitch.push_back(std::abs(dp) / dt);
            sroll.push_back(std::abs(dr) / dt);
        }
        py = f.head_yaw;
        pp = f.head_pitch;
        pr = f.head_roll;
        pt = f.t_ms;
        have_prev = true;
    }
    if (yaw.size() < 2) throw ValidationError("head_feature_vector: fewer than 2 valid frames in window");
    std::vector<double> out;
    out.reserve(kHeadDim);
    append(out, functionals_full(yaw).full());
    append(out, functionals_full(pitch).full());
    append(out, functionals_full(roll).full());
    append(out, functionals_full(syaw).full());
    append(out, functionals_full(spitch).full());
    append(out, functionals_full(sroll).full());
    append(out, functionals_full(ayaw).full());
    append(out, functionals_full(apitch).full());
    append(out, functionals_full(aroll).full());
    append(out, functionals_full(dyaw).mean_sd());
    append(out, functionals_full(dpitch).mean_sd());
    append(out, functionals_full(droll).mean_sd());
    if (static_cast<int>(out.size()) != kHeadDim)
        throw RuntimeError("head feature vector is " + std::to_string(out.size()) + "D, expected 87");
    return out;
}

std::vector<double> window_feature_vector(const std::vector<double>& gaze_67,
                                          const std::vector<double>& eye_67,
                                          const std::vector<double>& head_87,
                                          const std::vector<double>& looking_6, int glasses_flag) {
    if (static_cast<int>(gaze_67.size()) != kGazeDim || static_cast<int>(eye_67.size()) != kEyeDim ||
        static_cast<int>(head_87.size()) != kHeadDim || static_cast<int>(looking_6.size()) != kLookingDim)
        throw ValidationError("window_feature_vector: sub-vector dimensions " +
                              std::to_string(gaze_67.size()) + "/" + std::to_string(eye_67.size()) + "/" +
                              std::to_string(head_87.size()) + "/" + std::to_string(looking_6.size()) +
                              ", expected 67/67/87/6");
    if (glasses_flag < 0 || glasses_flag > 2)
        throw ValidationError("window_feature_vector: glasses flag must be 0, 1 or 2");
    std::vector<double> out;
    out.reserve(kWindowDim);
    out.insert(out.end(), gaze_67.begin(), gaze_67.end());
    out.insert(out.end(), eye_67.begin(), eye_67.end());
    out.insert(out.end(), head_87.begin(), head_87.end());
    out.insert(out.end(), looking_6.begin(), looking_6.end());
    out.push_back(static_cast<double>(glasses_flag));
    if (static_cast<int>(out.size()) != kWindowDim)
        throw RuntimeError("window feature vector is " + std::to_string(out.size()) + "D, expected 228");
    return out;
}

std::vector<std::string> window_feature_names() {
    const std::vector<std::string> full = {"min", "max", "mean", "sd", "range", "p25", "p50", "p75", "iqr"};
    const std::vector<std::string> no_range = {"min", "max", "mean", "sd", "p25", "p50", "p75", "iqr"};
    const std::vector<std::string> mean_sd = {"mean", "sd"};
    std::vector<std::string> names;
    names.reserve(kWindowDim);
    auto block = [&](const std::string& prefix, const std::vector<std::string>& series_full,
                     const std::vector<std::string>& series_no_range,
                     const std::vector<std::string>& series_mean_sd) {
        for (const auto& s : series_full)
            for (const auto& st : full) names.push_back(prefix + "_" + s + "_" + st);
        for (const auto& s : series_no_range)
            for (const auto& st : no_range) names.push_back(prefix + "_" + s + "_" + st);
        for (const auto& s : series_mean_sd)
            for (const auto& st : mean_sd) names.push_back(prefix + "_" + s + "_" + st);
    };
    block("gaze", {"x", "y", "abs_dx_dt", "abs_dy_dt", "abs_dvec_dt"}, {"abs_dx", "abs_dy"},
          {"dx", "dy", "abs_dvec"});
    block("eye", {"x", "y", "abs_dx_dt", "abs_dy_dt", "abs_dvec_dt"}, {"abs_dx", "abs_dy"},
          {"dx", "dy", "abs_dvec"});
    block("head", {"yaw", "pitch", "roll", "abs_dyaw_dt", "abs_dpitch_dt", "abs_droll_dt", "abs_dyaw",
                   "abs_dpitch", "abs_droll"},
          {}, {"dyaw", "dpitch", "droll"});
    for (int k = 0; k < kLookingDim; ++k) names.push_back("look_" + std::to_string(k));
    names.push_back("glasses_flag");
    if (static_cast<int>(names.size()) != kWindowDim)
        throw RuntimeError("window feature names: " + std::to_string(names.size()) + ", expected 228");
    return names;
}

}  // namespace affectfuse
