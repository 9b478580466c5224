#include "rramprog/error.hpp"

namespace rramprog {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::AlreadyFormed: return "AlreadyFormed";
  case ErrorCode::NotFormed: return "NotFormed";
  case ErrorCode::WrongPulseKind: return "WrongPulseKind";
  case ErrorCode::BadPulseWidth: return "BadPulseWidth";
  case ErrorCode::TimeBeforeAnchor: return "TimeBeforeAnchor";
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorCode::SenseSaturated: return "SenseSaturated";
  case ErrorCode::NegativeDt: return "NegativeDt";
  case ErrorCode::IntervalsOverlap: return "IntervalsOverlap";
  case ErrorCode::InsufficientSamples: return "InsufficientSamples";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::ValidationError: return "ValidationError";
  case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message) : Error(code, message, std::nullopt) {}

Error::Error(ErrorCode code, const std::string &message, std::optional<CellIndex> cell)
    : std::runtime_error(message), code_(code), cell_(cell) {}

Error Error::at(CellIndex cell) const {
  return Error(code_,
               std::string(what()) + " (device row " + std::to_string(cell.row) + ", col " +
                   std::to_string(cell.col) + ")",
               cell);
}

} // namespace rramprog
