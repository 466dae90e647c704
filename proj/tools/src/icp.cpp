#include "icp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "far3/errors.hpp"

namespace far3::tools {

namespace {

int brute_nearest(const std::vector<Vec3>& pts, const Vec3& q) {
    int best = 0;
    double best2 = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d2 = norm2(pts[i] - q);
        if (d2 < best2) {
            best2 = d2;
            best = static_cast<int>(i);
        }
    }
    return best;
}

class Grid {
public:
    explicit Grid(const std::vector<Vec3>& pts) : pts_(pts) {
        Vec3 lo = pts[0], hi = pts[0];
        for (const Vec3& p : pts) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        origin_ = lo;
        double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
        cell_ = std::max(extent / std::cbrt(static_cast<double>(pts.size())), 1e-9);
        for (std::size_t i = 0; i < pts.size(); ++i)
            cells_[key(coord(pts[i].x, origin_.x), coord(pts[i].y, origin_.y),
                       coord(pts[i].z, origin_.z))]
                .push_back(static_cast<int>(i));
        span_ = static_cast<std::int64_t>(extent / cell_) + 1;
    }

    static std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

    int nearest(const Vec3& q) const {
        std::int64_t cx = coord(q.x, origin_.x);
        std::int64_t cy = coord(q.y, origin_.y);
        std::int64_t cz = coord(q.z, origin_.z);
        std::int64_t start = std::max({std::int64_t(0), iabs(cx) - span_,
                                       iabs(cy) - span_, iabs(cz) - span_});
        int best = -1;
        double best2 = std::numeric_limits<double>::max();
        std::int64_t max_rad = span_ + std::max({iabs(cx), iabs(cy), iabs(cz)}) + 1;
        auto visit = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
            auto it = cells_.find(key(x, y, z));
            if (it == cells_.end()) return;
            for (int i : it->second) {
                double d2 = norm2(pts_[i] - q);
                if (d2 < best2) {
                    best2 = d2;
                    best = i;
                }
            }
        };
        for (std::int64_t rad = start; rad <= max_rad; ++rad) {
            if (best >= 0 && (static_cast<double>(rad) - 1.0) * cell_ > std::sqrt(best2)) break;
            for (std::int64_t dx = -rad; dx <= rad; ++dx)
                for (std::int64_t dy = -rad; dy <= rad; ++dy) {
                    if (std::max(iabs(dx), iabs(dy)) == rad) {
                        for (std::int64_t dz = -rad; dz <= rad; ++dz)
                            visit(cx + dx, cy + dy, cz + dz);
                    } else if (rad > 0) {
                        visit(cx + dx, cy + dy, cz - rad);
                        visit(cx + dx, cy + dy, cz + rad);
                    }
                }
        }
        return best;
    }

private:
    std::int64_t coord(double v, double o) const {
        return static_cast<std::int64_t>(std::floor((v - o) / cell_));
    }
    static std::int64_t key(std::int64_t x, std::int64_t y, std::int64_t z) {
        return ((x + 0x100000) << 42) ^ ((y + 0x100000) << 21) ^ (z + 0x100000);
    }

    const std::vector<Vec3>& pts_;
    Vec3 origin_;
    double cell_ = 1.0;
    std::int64_t span_ = 1;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

}  // namespace

IcpResult icp_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target,
                    const IcpConfig& cfg) {
    if (source.size() < 3 || target.size() < 3)
        throw TooFewPoints("icp needs at least 3 points on each side");

    bool use_grid = cfg.nn == IcpConfig::Nn::grid ||
                    (cfg.nn == IcpConfig::Nn::automatic && target.size() >= 2000);
    std::optional<Grid> grid;
    if (use_grid) grid.emplace(target);

    IcpResult result;
    RigidTransform cur;
    for (int outer = 1; outer <= cfg.max_outer_iterations; ++outer) {
        PointPairSet pairs;
        pairs.reference_points = source;
        pairs.body_points.reserve(source.size());
        std::unordered_set<int> matched;
        double sum2 = 0.0;
        for (const Vec3& s : source) {
            Vec3 q = apply(cur, s);
            int idx = grid ? grid->nearest(q) : brute_nearest(target, q);
            matched.insert(idx);
            sum2 += norm2(target[idx] - q);
            pairs.body_points.push_back(target[idx]);
        }
        if (matched.size() < 3)
            throw DegenerateCorrespondences("fewer than 3 distinct matched target points");
        result.rms_trace.push_back(std::sqrt(sum2 / static_cast<double>(source.size())));

        SolverReport rep = solve_pairs(pairs, cfg.solver, cfg.fa3r, cfg.fixed);
        double delta = geodesic_angle(cur.rotation, rep.transform.rotation) +
                       norm(cur.translation - rep.transform.translation);
        cur = rep.transform;
        result.outer_iterations = outer;
        if (delta < cfg.threshold) {
            result.transform = cur;
            return result;
        }
    }
    throw NotConverged("icp did not settle within the outer iteration limit");
}

}  // namespace far3::tools
