#include "gapsol/error.hpp"

namespace gapsol {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonHermitianCoupling: return "NonHermitianCoupling";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::NonIsolatedExtremum: return "NonIsolatedExtremum";
        case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
        case ErrorCode::NoGap: return "NoGap";
        case ErrorCode::AnisotropicIndefinite: return "AnisotropicIndefinite";
        case ErrorCode::NoRealGroundState: return "NoRealGroundState";
        case ErrorCode::BracketingFailure: return "BracketingFailure";
        case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
        case ErrorCode::NonConvergentMoment: return "NonConvergentMoment";
        case ErrorCode::NotInGap: return "NotInGap";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace gapsol
