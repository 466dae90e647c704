#pragma once

#include <string>
#include <vector>

#include "far3/covariance.hpp"

namespace far3::tools {

// One pair per line: rx ry rz bx by bz [weight]. '#' starts a comment;
// commas and tabs count as spaces; blank lines are skipped. The first data
// row fixes the column count. Throws ParseError carrying the 1-based line.
PointPairSet read_pair_file(const std::string& path);

// One point per line: x y z. Same lexical rules.
std::vector<Vec3> read_cloud_file(const std::string& path);

}  // namespace far3::tools
