#include "dispatch.hpp"

#include "far3/errors.hpp"

namespace far3::tools {

const std::vector<std::string>& solver_names() {
    static const std::vector<std::string> names{"svd",   "eig-p", "eig-g", "eig-k",
                                                "eig-w", "fa3r",  "fa3r-fixed"};
    return names;
}

SolverReport solve_cov(const CrossCovariance& cov, const std::string& solver,
                       const Fa3rConfig& fa3r_cfg, const FixedConfig& fixed_cfg) {
    if (solver == "svd") return svd_solve(cov);
    if (solver == "eig-p") return eig_solve(cov, EigMatrix::P);
    if (solver == "eig-g") return eig_solve(cov, EigMatrix::G);
    if (solver == "eig-k") return eig_solve(cov, EigMatrix::K);
    if (solver == "eig-w") return eig_solve(cov, EigMatrix::W);
    if (solver == "fa3r") return fa3r_solve(cov, fa3r_cfg);
    if (solver == "fa3r-fixed") return fixed_solve(cov, fixed_cfg);
    throw Error("unknown solver '" + solver + "'");
}

SolverReport solve_pairs(const PointPairSet& pairs, const std::string& solver,
                         const Fa3rConfig& fa3r_cfg, const FixedConfig& fixed_cfg) {
    if (pairs.size() < 3) throw TooFewPoints("registration needs at least 3 point pairs");
    return solve_cov(cross_covariance(pairs), solver, fa3r_cfg, fixed_cfg);
}

}  // namespace far3::tools
