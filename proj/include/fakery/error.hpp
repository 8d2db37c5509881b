#pragma once

#include <stdexcept>
#include <string>

namespace fakery {

// Base of every error the library throws. `kind()` is the stable name used in
// the CLI's machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FAKERY_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  }

FAKERY_DEFINE_ERROR(DecodeError);
FAKERY_DEFINE_ERROR(DimensionError);
FAKERY_DEFINE_ERROR(EmptyDatasetError);
FAKERY_DEFINE_ERROR(DegenerateClassError);
FAKERY_DEFINE_ERROR(FormatError);
FAKERY_DEFINE_ERROR(TruncationError);
FAKERY_DEFINE_ERROR(SingleClassError);
FAKERY_DEFINE_ERROR(LengthMismatchError);
FAKERY_DEFINE_ERROR(NoPositivesError);
FAKERY_DEFINE_ERROR(CacheConflictError);
FAKERY_DEFINE_ERROR(ChecksumError);
FAKERY_DEFINE_ERROR(MissingArtifactError);
FAKERY_DEFINE_ERROR(NoResultsError);
FAKERY_DEFINE_ERROR(ConfigError);
FAKERY_DEFINE_ERROR(IoError);

#undef FAKERY_DEFINE_ERROR

}  // namespace fakery
