#include "hints/error.hpp"

namespace hints {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::CorruptChecksum: return "CorruptChecksum";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorCode::SingularSplitting: return "SingularSplitting";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ModelMissing: return "ModelMissing";
    case ErrorCode::GridIncompatible: return "GridIncompatible";
    case ErrorCode::NonPositiveResidual: return "NonPositiveResidual";
    case ErrorCode::ZeroImage: return "ZeroImage";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace hints
