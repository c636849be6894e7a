#include "lmmk/error.hpp"

namespace lmmk {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZeroDistances: return "AllZeroDistances";
    case ErrorCode::NonPositiveBandwidth: return "NonPositiveBandwidth";
    case ErrorCode::NonPositiveDiagonal: return "NonPositiveDiagonal";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingletonClass: return "SingletonClass";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::EmptyTripleSet: return "EmptyTripleSet";
    case ErrorCode::LPNotOptimal: return "LPNotOptimal";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace lmmk
