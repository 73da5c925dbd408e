#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace affectfuse {

struct TrajectoryFrame {
    std::int64_t frame_idx = 0;
    std::int64_t t_ms = 0;
    double gaze_x = 0.0, gaze_y = 0.0;               // 3D gaze angles, degrees
    double head_yaw = 0.0, head_pitch = 0.0, head_roll = 0.0;
    double eye_x = 0.0, eye_y = 0.0;                 // derived eye-in-head rotation
    bool detected = true;                            // face/gaze estimate present
    bool valid = true;                               // set by validate_frames
    double origin[3] = {0.0, 0.0, 0.0};              // gaze origin, scene units
    double plane_x = 0.0, plane_y = 0.0;             // gaze point on camera plane
    bool has_plane_point = false;
};

struct FeatureWindow {
    std::string subject_id;
    std::int64_t center_ms = 0;
    std::int64_t begin_ms = 0;  // clipped coverage [begin, end)
    std::int64_t end_ms = 0;
    std::int64_t span_ms = 0;
    std::vector<std::size_t> frame_indices;  // all frames inside the window
    double valid_fraction = 0.0;
};

struct WindowStats {
    std::int64_t candidates = 0;
    std::int64_t kept = 0;
    double drop_rate() const {
        return candidates ? 1.0 - static_cast<double>(kept) / static_cast<double>(candidates) : 0.0;
    }
};

// Centered median filter with truncated edge windows (no padding). Edge
// windows shrink symmetrically, so every window is odd-sized and the first
// and last samples pass through unchanged.
std::vector<double> median_filter(const std::vector<double>& series, int width = 5);

// Same filter but only over entries whose mask bit is set; masked-out
// entries pass through unchanged and never enter a neighbour's window.
std::vector<double> median_filter_masked(const std::vector<double>& series,
                                         const std::vector<bool>& mask, int width = 5);

enum class EyeInHeadMode {
    Subtraction,      // e = (x_g - yaw, y_g - pitch), roll ignored
    RotationMatrix,   // gaze vector rotated into the head frame
};

void eye_in_head(double gaze_x, double gaze_y, double yaw, double pitch, double roll,
                 double& eye_x, double& eye_y, EyeInHeadMode mode = EyeInHeadMode::Subtraction);

struct ValidityThresholds {
    double max_eye_deg = 40.0;
    double max_eye_speed_deg_s = 860.0;
    double max_head_speed_deg_s = 700.0;
};

// Marks frames invalid for: missing face data, eye rotation beyond 40 deg,
// or implausible eye/head speed against the previous valid frame (actual
// frame-to-frame elapsed time). Requires strictly increasing timestamps.
std::vector<bool> validate_frames(const std::vector<TrajectoryFrame>& frames,
                                  const ValidityThresholds& thr = {});

struct WindowParams {
    std::int64_t window_ms = 1500;
    std::int64_t center_stride_ms = 500;
    std::int64_t min_span_ms = 500;
    double max_invalid = 0.5;
};

// Sliding windows centered every stride from t=0; edge windows are clipped
// to the video extent and survive if their covered span stays >= min_span.
std::vector<FeatureWindow> make_windows(const std::vector<TrajectoryFrame>& frames,
                                        const std::vector<bool>& validity,
                                        const std::string& subject_id,
                                        const WindowParams& params, WindowStats* stats = nullptr);

}  // namespace affectfuse
