#pragma once

#include <string>
#include <vector>

#include "dispatch.hpp"
#include "far3/geometry.hpp"

namespace far3::tools {

struct IcpConfig {
    int max_outer_iterations = 50;
    // Converged when geodesic rotation delta plus translation delta between
    // successive outer solutions drops below this.
    double threshold = 1e-8;
    enum class Nn { automatic, brute_force, grid } nn = Nn::automatic;
    std::string solver = "fa3r";
    Fa3rConfig fa3r;
    FixedConfig fixed;
};

struct IcpResult {
    RigidTransform transform;
    int outer_iterations = 0;
    std::vector<double> rms_trace;  // RMS correspondence distance at each matching step
};

// Classic alternation: match transformed source points to nearest target
// points, re-solve the absolute transform, repeat. Brute-force matching
// below 2000 target points, uniform grid hashing above (Nn::automatic).
// Throws NotConverged and DegenerateCorrespondences.
IcpResult icp_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target,
                    const IcpConfig& cfg);

}  // namespace far3::tools
