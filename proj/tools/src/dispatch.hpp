#pragma once

#include <string>
#include <vector>

#include "far3/baselines.hpp"
#include "far3/fa3r.hpp"
#include "far3/fixed_point.hpp"

namespace far3::tools {

const std::vector<std::string>& solver_names();

// Runs the named solver ("svd", "eig-p", "eig-g", "eig-k", "eig-w", "fa3r",
// "fa3r-fixed") on a prebuilt covariance.
SolverReport solve_cov(const CrossCovariance& cov, const std::string& solver,
                       const Fa3rConfig& fa3r_cfg, const FixedConfig& fixed_cfg);

SolverReport solve_pairs(const PointPairSet& pairs, const std::string& solver,
                         const Fa3rConfig& fa3r_cfg, const FixedConfig& fixed_cfg);

}  // namespace far3::tools
