#pragma once

#include <stdexcept>
#include <string>

namespace far3 {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonUnitQuaternion : Error { using Error::Error; };
struct NotARotation : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct NotOrthonormal : Error { using Error::Error; };
struct ZeroNorm : Error { using Error::Error; };
struct ZeroMatrix : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };
struct SvdNotConverged : Error { using Error::Error; };
struct DegenerateEigenvalue : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct DegenerateCorrespondences : Error { using Error::Error; };

// Input-file / option parsing failure. `line` is 1-based; 0 means the error
// is not tied to a specific line (e.g. the file could not be opened).
struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& msg)
        : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

}  // namespace far3
