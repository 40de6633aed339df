#include "tve/tensor.hpp"

namespace tve {

Mat3 lift_plane_strain(const Mat2& f2) {
  Mat3 f = Mat3::Identity();
  f.topLeftCorner<2, 2>() = f2;
  return f;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::NotSpd: return "NotSpd";
    case ErrorCode::NonPositiveDeterminant: return "NonPositiveDeterminant";
    case ErrorCode::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::NonPositiveCapacity: return "NonPositiveCapacity";
    case ErrorCode::NegativeTemperatureInput: return "NegativeTemperatureInput";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::DegenerateElement: return "DegenerateElement";
    case ErrorCode::LineSearchFailed: return "LineSearchFailed";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::InfeasibleInit: return "InfeasibleInit";
    case ErrorCode::CurveUndefined: return "CurveUndefined";
    case ErrorCode::MismatchedConfigs: return "MismatchedConfigs";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tve
