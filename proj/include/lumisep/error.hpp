#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lumisep {

enum class ErrorCode {
    GridMismatch,
    DegenerateDatabase,
    ZeroProjection,
    DimensionMismatch,
    SingularCoupling,
    EmptyField,
    AllPruned,
    EmptySet,
    ArcDegenerate,
    CollinearSet,
    CentroidDegenerate,
    BehindTangentPlane,
    AllCollinear,
    DegenerateHull,
    DegenerateLights,
    CountMismatch,
    DegenerateDirections,
    InvalidCount,
    ZeroTruth,
    MalformedHeader,
    TruncatedData,
    Io,
    InvalidArgument,
};

std::string_view error_name(ErrorCode code);

/// Failures that stem from the content of the observations rather than from
/// malformed inputs. The CLI maps these to exit code 3.
bool is_estimation_failure(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lumisep
