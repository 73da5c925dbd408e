#include "trajectories.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace affectfuse {

namespace {

double median_of(std::vector<double>& buf) {
    std::sort(buf.begin(), buf.end());
    const std::size_t n = buf.size();
    if (n % 2 == 1) return buf[n / 2];
    return 0.5 * (buf[n / 2 - 1] + buf[n / 2]);
}

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

}  // namespace

std::vector<double> median_filter(const std::vector<double>& series, int width) {
    if (series.empty()) throw ValidationError("median_filter: empty series");
    if (width < 1 || width % 2 == 0) throw ValidationError("median_filter: width must be odd and >= 1");
    const std::int64_t half = width / 2;
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    std::vector<double> out(series.size());
    std::vector<double> buf;
    for (std::int64_t i = 0; i < n; ++i) {
        // edge windows shrink symmetrically so they stay centered and odd,
        // keeping the output inside the input value set
        const std::int64_t h = std::min({half, i, n - 1 - i});
        buf.clear();
        for (std::int64_t j = i - h; j <= i + h; ++j) buf.push_back(series[static_cast<std::size_t>(j)]);
        out[static_cast<std::size_t>(i)] = median_of(buf);
    }
    return out;
}

std::vector<double> median_filter_masked(const std::vector<double>& series,
                                         const std::vector<bool>& mask, int width) {
    if (series.empty()) throw ValidationError("median_filter: empty series");
    if (series.size() != mask.size()) throw ValidationError("median_filter: mask length mismatch");
    if (width < 1 || width % 2 == 0) throw ValidationError("median_filter: width must be odd and >= 1");
    const int half = width / 2;
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    std::vector<double> out = series;
    std::vector<double> buf;
    for (std::int64_t i = 0; i < n; ++i) {
        if (!mask[static_cast<std::size_t>(i)]) continue;
        buf.clear();
        const std::int64_t lo = std::max<std::int64_t>(0, i - half);
        const std::int64_t hi = std::min<std::int64_t>(n - 1, i + half);
        for (std::int64_t j = lo; j <= hi; ++j)
            if (mask[static_cast<std::size_t>(j)]) buf.push_back(series[static_cast<std::size_t>(j)]);
        out[static_cast<std::size_t>(i)] = median_of(buf);
    }
    return out;
}

void eye_in_head(double gaze_x, double gaze_y, double yaw, double pitch, double roll,
                 double& eye_x, double& eye_y, EyeInHeadMode mode) {
    if (mode == EyeInHeadMode::Subtraction) {
        eye_x = gaze_x - yaw;
        eye_y = gaze_y - pitch;
        return;
    }
    // Gaze angles to a unit vector looking down -z, rotate it into the head
    // frame with R^T, then back to angles. R = Ry(-yaw) Rx(pitch) Rz(roll)
    // maps (0,0,-1) onto the head direction under the same angle convention
    // (positive yaw -> +x, positive pitch -> +y).
    const double gx = gaze_x * kDegToRad, gy = gaze_y * kDegToRad;
    const double v[3] = {std::sin(gx) * std::cos(gy), std::sin(gy), -std::cos(gx) * std::cos(gy)};
    const double cy = std::cos(yaw * kDegToRad), sy = std::sin(yaw * kDegToRad);
    const double cp = std::cos(pitch * kDegToRad), sp = std::sin(pitch * kDegToRad);
    const double cr = std::cos(roll * kDegToRad), sr = std::sin(roll * kDegToRad);
    double R[3][3] = {
        {cy * cr - sy * sp * sr, -cy * sr - sy * sp * cr, -sy * cp},
        {cp * sr, cp * cr, -sp},
        {sy * cr + cy * sp * sr, -sy * sr + cy * sp * cr, cy * cp},
    };
    double e[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i)  // e = R^T v
        e[i] = R[0][i] * v[0] + R[1][i] * v[1] + R[2][i] * v[2];
    eye_x = std::atan2(e[0], -e[2]) * kRadToDeg;
    eye_y = std::asin(std::clamp(e[1], -1.0, 1.0)) * kRadToDeg;
}

std::vector<bool> validate_frames(const std::vector<TrajectoryFrame>& frames,
                                  const ValidityThresholds& thr) {
    std::vector<bool> valid(frames.size(), false);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].t_ms <= frames[i - 1].t_ms)
            throw ValidationError("validate_frames: non-monotonic timestamps at frame " +
                                  std::to_string(frames[i].frame_idx));
    }
    std::ptrdiff_t last_valid = -1;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const TrajectoryFrame& f = frames[i];
        if (!f.detected) continue;
        if (std::abs(f.eye_x) > thr.max_eye_deg || std::abs(f.eye_y) > thr.max_eye_deg) continue;
        if (last_valid >= 0) {
            const TrajectoryFrame& p = frames[static_cast<std::size_t>(last_valid)];
            const double dt_s = static_cast<double>(f.t_ms - p.t_ms) / 1000.0;
            const double eye_speed =
                std::hypot(f.eye_x - p.eye_x, f.eye_y - p.eye_y) / dt_s;
            if (eye_speed > thr.max_eye_speed_deg_s) continue;
            const double head_speed =
                std::max({std::abs(f.head_yaw - p.head_yaw), std::abs(f.head_pitch - p.head_pitch),
                          std::abs(f.head_roll - p.head_roll)}) /
                dt_s;
            if (head_speed > thr.max_head_speed_deg_s) continue;
        }
        valid[i] = true;
        last_valid = static_cast<std::ptrdiff_t>(i);
    }
    return valid;
}

std::vector<FeatureWindow> make_windows(const std::vector<TrajectoryFrame>& frames,
                                        const std::vector<bool>& validity,
                                        const std::string& subject_id,
                                        const WindowParams& params, WindowStats* stats) {
    std::vector<FeatureWindow> windows;
    if (frames.empty()) return windows;
    if (frames.size() != validity.size()) throw ValidationError("make_windows: validity length mismatch");

    const std::int64_t half = params.window_ms / 2;
    const std::int64_t t_start = frames.front().t_ms;
    // video extent runs one nominal frame period past the last timestamp
    std::int64_t nominal_dt = 40;
    if (frames.size() >= 2) {
        std::vector<double> dts;
        dts.reserve(frames.size() - 1);
        for (std::size_t i = 1; i < frames.size(); ++i)
            dts.push_back(static_cast<double>(frames[i].t_ms - frames[i - 1].t_ms));
        std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2), dts.end());
        nominal_dt = static_cast<std::int64_t>(dts[dts.size() / 2]);
    }
    const std::int64_t t_end = frames.back().t_ms + nominal_dt;

    WindowStats local;
    std::size_t first_in_window = 0;
    for (std::int64_t center = 0; center - half < t_end; center += params.center_stride_ms) {
        const std::int64_t lo = center - half;
        const std::int64_t hi = center + half;
        const std::int64_t begin = std::max(lo, t_start);
        const std::int64_t end = std::min(hi, t_end);
        if (end <= begin) continue;
        ++local.candidates;

        while (first_in_window < frames.size() && frames[first_in_window].t_ms < lo) ++first_in_window;
        FeatureWindow w;
        w.subject_id = subject_id;
        w.center_ms = center;
        w.begin_ms = begin;
        w.end_ms = end;
        w.span_ms = end - begin;
        std::size_t n_valid = 0;
        for (std::size_t i = first_in_window; i < frames.size() && frames[i].t_ms < hi; ++i) {
            w.frame_indices.push_back(i);
            if (validity[i]) ++n_valid;
        }
        if (w.frame_indices.empty()) continue;
        w.valid_fraction = static_cast<double>(n_valid) / static_cast<double>(w.frame_indices.size());
        if (w.span_ms < params.min_span_ms) continue;
        if (1.0 - w.valid_fraction > params.max_invalid) continue;
        ++local.kept;
        windows.push_back(std::move(w));
    }
    if (stats) *stats = local;
    return windows;
}

}  // namespace affectfuse
