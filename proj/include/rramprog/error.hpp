#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rramprog {

enum class ErrorCode {
  AlreadyFormed,
  NotFormed,
  WrongPulseKind,
  BadPulseWidth,
  TimeBeforeAnchor,
  InvalidConfig,
  IndexOutOfRange,
  SenseSaturated,
  NegativeDt,
  IntervalsOverlap,
  InsufficientSamples,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

struct CellIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const CellIndex &, const CellIndex &) = default;
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const { return code_; }
  const std::optional<CellIndex> &cell() const { return cell_; }

  // Re-raise with the crossbar location attached.
  [[nodiscard]] Error at(CellIndex cell) const;

private:
  Error(ErrorCode code, const std::string &message, std::optional<CellIndex> cell);

  ErrorCode code_;
  std::optional<CellIndex> cell_;
};

} // namespace rramprog
