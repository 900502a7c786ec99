#pragma once

#include <stdexcept>
#include <string>

namespace kstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KSTAB_DEFINE_ERROR(Name) \
  class Name : public Error {    \
   public:                       \
    using Error::Error;          \
  }

KSTAB_DEFINE_ERROR(DimensionError);
KSTAB_DEFINE_ERROR(SignatureError);
KSTAB_DEFINE_ERROR(NoConvergence);
KSTAB_DEFINE_ERROR(DegreeDropError);
KSTAB_DEFINE_ERROR(PrecisionError);
KSTAB_DEFINE_ERROR(SingularMatrixError);
KSTAB_DEFINE_ERROR(ZeroPolynomialError);
KSTAB_DEFINE_ERROR(UnsupportedQuadricError);
KSTAB_DEFINE_ERROR(NormalizationError);
KSTAB_DEFINE_ERROR(ScalingPreconditionError);
KSTAB_DEFINE_ERROR(UnboundedSliceError);
KSTAB_DEFINE_ERROR(IdentityCheckError);
KSTAB_DEFINE_ERROR(ParseError);

#undef KSTAB_DEFINE_ERROR

}  // namespace kstab
