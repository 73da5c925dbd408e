#include "attention.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "errors.hpp"
#include "functionals.hpp"

namespace affectfuse {

std::optional<Vec2> gaze_point_on_plane(const double origin[3], const double direction[3]) {
    const double norm = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] +
                                  direction[2] * direction[2]);
    if (norm == 0.0) throw ValidationError("gaze_point_on_plane: zero-length direction");
    const double dz = direction[2] / norm;
    if (dz == 0.0) return std::nullopt;  // parallel to the plane
    const double t = -origin[2] / dz;
    if (t <= 0.0) return std::nullopt;  // pointing away
    return Vec2{origin[0] + t * direction[0] / norm, origin[1] + t * direction[1] / norm};
}

void gaze_direction_from_angles(double gaze_x_deg, double gaze_y_deg, double out[3]) {
    const double gx = gaze_x_deg * M_PI / 180.0;
    const double gy = gaze_y_deg * M_PI / 180.0;
    out[0] = std::sin(gx) * std::cos(gy);
    out[1] = std::sin(gy);
    out[2] = -std::cos(gx) * std::cos(gy);
}

namespace {

// uniform grid over the points with cell size = radius, for exact
// fixed-radius neighbour queries during the shift iterations
class PointGrid {
public:
    PointGrid(const std::vector<Vec2>& points, double cell) : points_(points), cell_(cell) {
        for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i])].push_back(i);
    }

    // mean of points within radius of q; count returned via n
    Vec2 shifted_mean(const Vec2& q, double radius, std::size_t& n) const {
        const double r2 = radius * radius;
        Vec2 sum;
        n = 0;
        const std::int64_t cx = coord(q.x), cy = coord(q.y);
        for (std::int64_t gx = cx - 1; gx <= cx + 1; ++gx) {
            for (std::int64_t gy = cy - 1; gy <= cy + 1; ++gy) {
                auto it = cells_.find(pack(gx, gy));
                if (it == cells_.end()) continue;
                for (std::size_t i : it->second) {
                    const double dx = points_[i].x - q.x, dy = points_[i].y - q.y;
                    if (dx * dx + dy * dy <= r2) {
                        sum.x += points_[i].x;
                        sum.y += points_[i].y;
                        ++n;
                    }
                }
            }
        }
        if (n) {
            sum.x /= static_cast<double>(n);
            sum.y /= static_cast<double>(n);
        }
        return sum;
    }

private:
    std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    std::uint64_t key(const Vec2& p) const { return pack(coord(p.x), coord(p.y)); }
    static std::uint64_t pack(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
    }
    const std::vector<Vec2>& points_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

std::vector<VCCluster> mean_shift(const std::vector<Vec2>& points, double bandwidth,
                                  const MeanShiftParams& params, std::vector<int>* assignment) {
    if (points.empty()) throw ValidationError("mean_shift: no points");
    if (bandwidth <= 0.0) throw ValidationError("mean_shift: bandwidth must be positive");

    PointGrid grid(points, bandwidth);
    std::vector<Vec2> modes;
    std::vector<std::vector<std::size_t>> members;
    std::vector<int> assign(points.size(), -1);

    const double merge_dist = params.merge_factor * bandwidth;
    for (std::size_t seed = 0; seed < points.size(); ++seed) {
        Vec2 pos = points[seed];
        for (int iter = 0; iter < params.max_iterations; ++iter) {
            std::size_t n = 0;
            const Vec2 next = grid.shifted_mean(pos, bandwidth, n);
            if (n == 0) break;  // isolated point: its own fixed point
            const double step = std::hypot(next.x - pos.x, next.y - pos.y);
            pos = next;
            if (step < params.convergence_tol) break;
        }
        int cluster = -1;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            if (std::hypot(modes[m].x - pos.x, modes[m].y - pos.y) <= merge_dist) {
                cluster = static_cast<int>(m);
                break;
            }
        }
        if (cluster < 0) {
            modes.push_back(pos);
            members.emplace_back();
            cluster = static_cast<int>(modes.size()) - 1;
        }
        members[static_cast<std::size_t>(cluster)].push_back(seed);
        assign[seed] = cluster;
    }

    std::vector<VCCluster> clusters(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        VCCluster& c = clusters[m];
        c.center = modes[m];
        c.member_count = static_cast<std::int64_t>(members[m].size());
        Vec2 mean;
        for (std::size_t i : members[m]) {
            mean.x += points[i].x;
            mean.y += points[i].y;
        }
        mean.x /= static_cast<double>(members[m].size());
        mean.y /= static_cast<double>(members[m].size());
        for (std::size_t i : members[m]) {
            const double dx = points[i].x - mean.x, dy = points[i].y - mean.y;
            c.cov[0][0] += dx * dx;
            c.cov[0][1] += dx * dy;
            c.cov[1][0] += dx * dy;
            c.cov[1][1] += dy * dy;
        }
        const double n = static_cast<double>(members[m].size());
        c.cov[0][0] /= n;
        c.cov[0][1] /= n;
        c.cov[1][0] /= n;
        c.cov[1][1] /= n;
    }

    // sort by member count descending (stable on the deterministic seed order)
    std::vector<std::size_t> order(clusters.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return clusters[a].member_count > clusters[b].member_count;
    });
    std::vector<VCCluster> sorted;
    std::vector<int> rank(clusters.size());
    sorted.reserve(clusters.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[order[i]] = static_cast<int>(i);
        sorted.push_back(clusters[order[i]]);
    }
    if (assignment) {
        assignment->resize(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) (*assignment)[i] = rank[static_cast<std::size_t>(assign[i])];
    }
    return sorted;
}

double estimate_bandwidth(const std::vector<Vec2>& points) {
    if (points.size() < 2) throw ValidationError("estimate_bandwidth: need at least 2 points");
    // nearest neighbour by x-sorted sweep; exact, fast when spread in x
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a].x < points[b].x; });
    std::vector<double> nn(points.size(), 0.0);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const Vec2& p = points[order[oi]];
        double best2 = std::numeric_limits<double>::infinity();
        for (std::size_t dir = 0; dir < 2; ++dir) {
            if (dir == 0) {
                for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
                    const Vec2& q = points[order[oj]];
                    const double dx = q.x - p.x;
                    if (dx * dx > best2) break;
                    const double d2 = dx * dx + (q.y - p.y) * (q.y - p.y);
                    best2 = std::min(best2, d2);
                    if (best2 == 0.0) break;
                }
            } else {
                for (std::size_t oj = oi; oj-- > 0;) {
                    const Vec2& q = points[order[oj]];
                    const double dx = p.x - q.x;
                    if (dx * dx > best2) break;
                    const double d2 = dx * dx + (q.y - p.y) * (q.y - p.y);
                    best2 = std::min(best2, d2);
                    if (best2 == 0.0) break;
                }
            }
            if (best2 == 0.0) break;
        }
        nn[order[oi]] = std::sqrt(best2);
    }
    const double med = percentile(nn, 0.5);
    return std::max(3.0 * med, 1e-6);
}

std::vector<std::size_t> prefilter_center_box(const std::vector<Vec2>& points, double box_scale) {
    std::vector<std::size_t> kept;
    if (points.empty()) return kept;
    std::vector<double> xs(points.size()), ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    const double qx1 = percentile(xs, 0.25), qx3 = percentile(xs, 0.75);
    const double qy1 = percentile(ys, 0.25), qy3 = percentile(ys, 0.75);
    const double cx = 0.5 * (qx1 + qx3), cy = 0.5 * (qy1 + qy3);
    const double hx = 0.5 * box_scale * (qx3 - qx1), hy = 0.5 * box_scale * (qy3 - qy1);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (hx > 0.0 && std::abs(points[i].x - cx) > hx) continue;
        if (hy > 0.0 && std::abs(points[i].y - cy) > hy) continue;
        kept.push_back(i);
    }
    return kept;
}

double mahalanobis_distance(const Vec2& p, const VCCluster& cluster, double regularization) {
    double a = cluster.cov[0][0], b = cluster.cov[0][1], c = cluster.cov[1][0], d = cluster.cov[1][1];
    double det = a * d - b * c;
    if (!(det > 1e-300) || !std::isfinite(det)) {
        a += regularization;
        d += regularization;
        det = a * d - b * c;
    }
    const double dx = p.x - cluster.center.x, dy = p.y - cluster.center.y;
    // [dx dy] * inv(S) * [dx dy]^T with inv computed analytically
    const double q = (d * dx * dx - (b + c) * dx * dy + a * dy * dy) / det;
    return std::sqrt(std::max(q, 0.0));
}

double mahalanobis_weight(const Vec2& p, const VCCluster& cluster, const MahalanobisWeightParams& params) {
    const double d = mahalanobis_distance(p, cluster, params.regularization);
    if (d <= params.thr1) return 1.0;
    if (d > params.thr2) return 0.0;
    if (params.formula == WeightFormula::Literal) return (1.0 - d) / params.thr2;
    return 1.0 - d / params.thr2;
}

LookingnessVector lookingness_vector(const std::vector<double>& frame_weights) {
    LookingnessVector out;
    out.values.assign(6, 0.0);
    if (frame_weights.empty()) {
        out.empty_window = true;
        return out;
    }
    for (double w : frame_weights) {
        int bin = static_cast<int>(std::clamp(w, 0.0, 1.0) * 6.0);
        if (bin > 5) bin = 5;  // w == 1 falls in the closed last bin
        out.values[static_cast<std::size_t>(bin)] += 1.0;
    }
    for (double& v : out.values) v /= static_cast<double>(frame_weights.size());
    return out;
}

}  // namespace affectfuse
