#include "hwas/errors.hpp"

namespace hwas {

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateVisitConflict: return "DuplicateVisitConflict";
    case Errc::UnmappableCode: return "UnmappableCode";
    case Errc::InvalidCode: return "InvalidCode";
    case Errc::EmptyTract: return "EmptyTract";
    case Errc::NoData: return "NoData";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::Collinear: return "Collinear";
    case Errc::NotConverged: return "NotConverged";
    case Errc::UnknownCovariate: return "UnknownCovariate";
    case Errc::NoInformativeStrata: return "NoInformativeStrata";
    case Errc::NoControls: return "NoControls";
    case Errc::MissingExposure: return "MissingExposure";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace hwas
