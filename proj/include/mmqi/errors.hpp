#pragma once

#include <stdexcept>
#include <string>

namespace mmqi {

/// Base class of every error thrown by this library. Messages name the
/// operation that failed so callers can map failures onto their own
/// diagnostics (the CLI turns them into exit codes).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MMQI_DEFINE_ERROR(name)             \
    class name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

MMQI_DEFINE_ERROR(InvalidArgs);
MMQI_DEFINE_ERROR(DimensionCap);
MMQI_DEFINE_ERROR(NotInBasis);
MMQI_DEFINE_ERROR(NonHermitianCoeff);
MMQI_DEFINE_ERROR(DimMismatch);
MMQI_DEFINE_ERROR(NonRealExpectation);
MMQI_DEFINE_ERROR(ModeOutOfRange);
MMQI_DEFINE_ERROR(NonUnitDirection);
MMQI_DEFINE_ERROR(NormalizationError);
MMQI_DEFINE_ERROR(RangeError);
MMQI_DEFINE_ERROR(ProbabilityNormalization);
MMQI_DEFINE_ERROR(NonPhysicalState);
MMQI_DEFINE_ERROR(NonPositiveFisher);
MMQI_DEFINE_ERROR(VanishingSignal);
MMQI_DEFINE_ERROR(ZeroVisibility);
MMQI_DEFINE_ERROR(PhaseFullySmeared);
MMQI_DEFINE_ERROR(WindowTooSmall);
MMQI_DEFINE_ERROR(NoMaximumInInterval);

#undef MMQI_DEFINE_ERROR

}  // namespace mmqi
