#pragma once

#include <stdexcept>
#include <string>

namespace extlab {

/// Base class of every failure raised by the library. Each concrete kind
/// below corresponds to one contract violation so callers can catch
/// exactly what they expect.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define EXTLAB_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

EXTLAB_DEFINE_ERROR(NotHermitian);
EXTLAB_DEFINE_ERROR(DimensionMismatch);
EXTLAB_DEFINE_ERROR(InvalidArgument);
EXTLAB_DEFINE_ERROR(NotInRange);
EXTLAB_DEFINE_ERROR(NotInDomain);
EXTLAB_DEFINE_ERROR(EpsOutOfRange);
EXTLAB_DEFINE_ERROR(ConsistencyFailure);
EXTLAB_DEFINE_ERROR(InsufficientProbes);
EXTLAB_DEFINE_ERROR(NotUnitary);
EXTLAB_DEFINE_ERROR(ExtrapolationDivergence);
EXTLAB_DEFINE_ERROR(ConfigError);

#undef EXTLAB_DEFINE_ERROR

}  // namespace extlab
