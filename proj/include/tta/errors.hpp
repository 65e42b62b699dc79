#pragma once

#include <stdexcept>
#include <string>

namespace tta {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TTA_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  };

// model
TTA_DEFINE_ERROR(ParseError)
TTA_DEFINE_ERROR(ValidationError)
TTA_DEFINE_ERROR(OverflowError)
TTA_DEFINE_ERROR(NoPathError)
TTA_DEFINE_ERROR(ArgumentError)
TTA_DEFINE_ERROR(IoError)

// scheduler / analysis / objective
TTA_DEFINE_ERROR(NotScheduledError)
TTA_DEFINE_ERROR(DegenerateServiceError)
TTA_DEFINE_ERROR(MissingWcdError)

// environment / agent
TTA_DEFINE_ERROR(EmptyCaseError)
TTA_DEFINE_ERROR(EpisodeDoneError)
TTA_DEFINE_ERROR(ShapeMismatchError)
TTA_DEFINE_ERROR(NaNError)
TTA_DEFINE_ERROR(TopologyMismatchError)
TTA_DEFINE_ERROR(SignatureMismatchError)

// baselines
TTA_DEFINE_ERROR(TooLargeError)

#undef TTA_DEFINE_ERROR

}  // namespace tta
