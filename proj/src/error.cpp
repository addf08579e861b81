#include "lumisep/error.hpp"

namespace lumisep {

std::string_view error_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateDatabase: return "DegenerateDatabase";
    case ErrorCode::ZeroProjection: return "ZeroProjection";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularCoupling: return "SingularCoupling";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::AllPruned: return "AllPruned";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ArcDegenerate: return "ArcDegenerate";
    case ErrorCode::CollinearSet: return "CollinearSet";
    case ErrorCode::CentroidDegenerate: return "CentroidDegenerate";
    case ErrorCode::BehindTangentPlane: return "BehindTangentPlane";
    case ErrorCode::AllCollinear: return "AllCollinear";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::DegenerateLights: return "DegenerateLights";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::DegenerateDirections: return "DegenerateDirections";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool is_estimation_failure(ErrorCode code)
{
    switch (code) {
    case ErrorCode::EmptyField:
    case ErrorCode::AllPruned:
    case ErrorCode::EmptySet:
    case ErrorCode::ArcDegenerate:
    case ErrorCode::CollinearSet:
    case ErrorCode::CentroidDegenerate:
    case ErrorCode::BehindTangentPlane:
    case ErrorCode::AllCollinear:
    case ErrorCode::DegenerateHull:
    case ErrorCode::DegenerateLights:
    case ErrorCode::DegenerateDirections:
        return true;
    default:
        return false;
    }
}

}  // namespace lumisep
