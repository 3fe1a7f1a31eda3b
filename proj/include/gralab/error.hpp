#pragma once

#include <stdexcept>
#include <string>

namespace gralab {

// Base for every error raised by the engines. Each derived type names one
// contract violation so callers (and the CLI) can map it to a diagnostic.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define GRALAB_DEFINE_ERROR(Name)                 \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

GRALAB_DEFINE_ERROR(InvalidArgument);
GRALAB_DEFINE_ERROR(DegenerateState);
GRALAB_DEFINE_ERROR(TruncationError);
GRALAB_DEFINE_ERROR(ZeroMeanIntensity);
GRALAB_DEFINE_ERROR(ConfigError);
GRALAB_DEFINE_ERROR(InsufficientCounts);
GRALAB_DEFINE_ERROR(SingularDenominator);
GRALAB_DEFINE_ERROR(StepTooLarge);
GRALAB_DEFINE_ERROR(NodeError);
GRALAB_DEFINE_ERROR(EmptyCurve);

#undef GRALAB_DEFINE_ERROR

} // namespace gralab
