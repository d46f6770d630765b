#pragma once

#include <stdexcept>
#include <string>

namespace hwas {

// Condition codes for recoverable, typed failures. Parsing-level row errors
// are counted rather than thrown; these cover operation-level contract
// violations and per-fit failures that callers may want to branch on.
enum class Errc {
  MalformedRow,
  DuplicateVisitConflict,
  UnmappableCode,
  InvalidCode,
  EmptyTract,
  NoData,
  OutOfDomain,
  Collinear,
  NotConverged,
  UnknownCovariate,
  NoInformativeStrata,
  NoControls,
  MissingExposure,
  DimensionMismatch,
  InvalidInput,
  Internal,
};

const char* errc_name(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace hwas
