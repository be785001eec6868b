#ifndef SCATTER_ERROR_HPP
#define SCATTER_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace scatter {

enum class ErrorKind {
  MalformedInput,
  RankDeficient,
  OnArrangement,
  InconsistentPoint,
  DegenerateScale,
  GroundSetTooLarge,
  InternalInconsistency,
  NotEssential,
  StartDegenerate,
  CountMismatch,
  RealityViolation,
  ChamberViolation,
  BadM,
  CensusMismatch,
  UnmatchedCluster,
  SubsystemViolation,
  RegularityContradiction,
  MatrixTooLarge,
  SingularSelection,
  DegreeCollapse,
  SpecializationMismatch,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::OnArrangement: return "OnArrangement";
    case ErrorKind::InconsistentPoint: return "InconsistentPoint";
    case ErrorKind::DegenerateScale: return "DegenerateScale";
    case ErrorKind::GroundSetTooLarge: return "GroundSetTooLarge";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::NotEssential: return "NotEssential";
    case ErrorKind::StartDegenerate: return "StartDegenerate";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::RealityViolation: return "RealityViolation";
    case ErrorKind::ChamberViolation: return "ChamberViolation";
    case ErrorKind::BadM: return "BadM";
    case ErrorKind::CensusMismatch: return "CensusMismatch";
    case ErrorKind::UnmatchedCluster: return "UnmatchedCluster";
    case ErrorKind::SubsystemViolation: return "SubsystemViolation";
    case ErrorKind::RegularityContradiction: return "RegularityContradiction";
    case ErrorKind::MatrixTooLarge: return "MatrixTooLarge";
    case ErrorKind::SingularSelection: return "SingularSelection";
    case ErrorKind::DegreeCollapse: return "DegreeCollapse";
    case ErrorKind::SpecializationMismatch: return "SpecializationMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace scatter

#endif  // SCATTER_ERROR_HPP
