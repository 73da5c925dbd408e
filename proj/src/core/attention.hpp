#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace affectfuse {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct VCCluster {
    Vec2 center;             // converged mode (fixed point of the shift map)
    double cov[2][2] = {{0, 0}, {0, 0}};  // covariance of member points
    std::int64_t member_count = 0;
};

// Intersection of the ray origin + t*direction (t > 0) with the z=0 plane;
// nullopt when the ray is parallel to or points away from it.
std::optional<Vec2> gaze_point_on_plane(const double origin[3], const double direction[3]);

// Unit gaze direction from horizontal/vertical angles in degrees, looking
// toward -z (so a camera plane at z=0 is hit from positive z).
void gaze_direction_from_angles(double gaze_x_deg, double gaze_y_deg, double out[3]);

struct MeanShiftParams {
    double convergence_tol = 1e-4;  // scene units
    int max_iterations = 300;
    double merge_factor = 0.5;      // modes merged within merge_factor * bandwidth
};

// Flat-kernel mean shift seeded at every point. Returns clusters sorted by
// member count descending; member counts sum to the input size. Also fills
// `assignment` (cluster index per point) when non-null.
std::vector<VCCluster> mean_shift(const std::vector<Vec2>& points, double bandwidth,
                                  const MeanShiftParams& params = {},
                                  std::vector<int>* assignment = nullptr);

// 3x the median nearest-neighbour distance, floored at 1e-6. Needs >= 2 points.
double estimate_bandwidth(const std::vector<Vec2>& points);

// Robust pre-filter before clustering: keeps points inside the per-axis
// interquartile box scaled by `box_scale` about its own center. Returns the
// kept indices. A degenerate (zero-IQR) axis keeps everything on that axis.
std::vector<std::size_t> prefilter_center_box(const std::vector<Vec2>& points, double box_scale = 3.0);

enum class WeightFormula {
    Repaired,  // w = 1 - d/thr2 on (thr1, thr2]; continuous at thr2
    Literal,   // w = (1 - d)/thr2 on (thr1, thr2]; can go negative
};

struct MahalanobisWeightParams {
    double thr1 = 1.0;
    double thr2 = 4.0;
    double regularization = 1e-8;
    WeightFormula formula = WeightFormula::Repaired;
};

double mahalanobis_distance(const Vec2& p, const VCCluster& cluster, double regularization = 1e-8);

// w = 1 for d <= thr1, the configured ramp on (thr1, thr2], 0 beyond thr2.
double mahalanobis_weight(const Vec2& p, const VCCluster& cluster,
                          const MahalanobisWeightParams& params = {});

// Average of per-frame 6-bin one-hot encodings of the weights (equal-width
// bins on [0,1], last bin closed). Empty input -> zero vector, flagged.
struct LookingnessVector {
    std::vector<double> values;  // 6 entries
    bool empty_window = false;
};

LookingnessVector lookingness_vector(const std::vector<double>& frame_weights);

}  // namespace affectfuse
