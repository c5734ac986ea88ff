#include "mg/error.hpp"

namespace mg {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroDirection: return "ZeroDirection";
    case ErrorKind::DegenerateLine: return "DegenerateLine";
    case ErrorKind::NonpositiveAperture: return "NonpositiveAperture";
    case ErrorKind::VerticalZeroMode: return "VerticalZeroMode";
    case ErrorKind::ZeroFrequency: return "ZeroFrequency";
    case ErrorKind::InsufficientSweep: return "InsufficientSweep";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
    case ErrorKind::PadTooSmall: return "PadTooSmall";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MissingConstants: return "MissingConstants";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DegenerateNorms: return "DegenerateNorms";
    case ErrorKind::MissingOrders: return "MissingOrders";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace mg
