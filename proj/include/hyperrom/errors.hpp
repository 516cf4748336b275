// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_ERRORS_HPP
#define HYPERROM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hyperrom {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct UnsupportedOrder : Error { using Error::Error; };

struct InvalidGrid : Error { using Error::Error; };
struct InvalidDegree : Error { using Error::Error; };
struct PointOutsideDomain : Error { using Error::Error; };
struct CaseDimensionMismatch : Error { using Error::Error; };
struct NewtonDiverged : Error { using Error::Error; };

struct UnknownCase : Error { using Error::Error; };
struct DerivativeUnavailable : Error { using Error::Error; };

struct RankCollapse : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct DegenerateResidual : Error { using Error::Error; };
struct MissingSystem : Error { using Error::Error; };

struct EmptyTrainingSet : Error { using Error::Error; };
struct MismatchedSets : Error { using Error::Error; };
struct MissingReference : Error { using Error::Error; };
struct IncompleteReport : Error { using Error::Error; };

struct UnknownKey : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct ArtifactMismatch : Error { using Error::Error; };

}  // namespace hyperrom

#endif
