#pragma once

#include <array>
#include <string>
#include <vector>

#include "trajectories.hpp"

namespace affectfuse {

// Summary statistics over one windowed series. Percentiles use linear
// interpolation between order statistics; SD is the population SD.
struct FunctionalSet {
    double min = 0, max = 0, mean = 0, sd = 0, range = 0;
    double p25 = 0, p50 = 0, p75 = 0, iqr = 0;

    // full set: min, max, mean, sd, range, p25, p50, p75, iqr
    std::array<double, 9> full() const { return {min, max, mean, sd, range, p25, p50, p75, iqr}; }
    // full set minus range
    std::array<double, 8> no_range() const { return {min, max, mean, sd, p25, p50, p75, iqr}; }
    std::array<double, 2> mean_sd() const { return {mean, sd}; }
};

FunctionalSet functionals_full(const std::vector<double>& series);

// percentile at q in [0,1] by linear interpolation (series gets sorted)
double percentile(std::vector<double> sorted_copy, double q);

inline constexpr int kGazeDim = 67;
inline constexpr int kEyeDim = 67;
inline constexpr int kHeadDim = 87;
inline constexpr int kLookingDim = 6;
inline constexpr int kWindowDim = kGazeDim + kEyeDim + kHeadDim + kLookingDim + 1;  // 228

enum class AngularComponent { Gaze, Eye };

// Per-window 2D-angle features (gaze or eye): full functionals on the two
// angle components and the three speeds, reduced functionals on the two
// per-component displacement magnitudes, mean/SD on the signed differences
// and the displacement-vector magnitude. Differences pair consecutive valid
// frames; speeds divide by the actual elapsed time in seconds.
//
//   9 x {x, y, |dx|/t, |dy|/t, |dv|/t}  = 45
//   8 x {|dx|, |dy|}                    = 16
//   2 x {dx, dy, |dv|}                  =  6   -> 67
std::vector<double> gaze_feature_vector(const std::vector<TrajectoryFrame>& frames,
                                        const std::vector<std::size_t>& window_frames,
                                        const std::vector<bool>& validity, AngularComponent component);

// Per-window head-pose features:
//   9 x {yaw, pitch, roll}              = 27
//   9 x {|dy|/t, |dp|/t, |dr|/t}        = 27
//   9 x {|dy|, |dp|, |dr|}              = 27
//   2 x {dy, dp, dr}                    =  6   -> 87
std::vector<double> head_feature_vector(const std::vector<TrajectoryFrame>& frames,
                                        const std::vector<std::size_t>& window_frames,
                                        const std::vector<bool>& validity);

// gaze(67) || eye(67) || head(87) || looking(6) || glasses_flag(1) = 228
std::vector<double> window_feature_vector(const std::vector<double>& gaze_67,
                                          const std::vector<double>& eye_67,
                                          const std::vector<double>& head_87,
                                          const std::vector<double>& looking_6, int glasses_flag);

// column names for the 228-D vector, in concatenation order
std::vector<std::string> window_feature_names();

}  // namespace affectfuse
