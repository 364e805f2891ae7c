#pragma once

#include <stdexcept>
#include <string>

namespace diracbvp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : Error { using Error::Error; };
struct DegenerateTheta : Error { using Error::Error; };
struct NonNormalizable : Error { using Error::Error; };
struct EmptySampler : Error { using Error::Error; };
struct InvalidArgument : Error { using Error::Error; };
struct OutsideGap : Error { using Error::Error; };
struct NotAnEigenvalue : Error { using Error::Error; };
struct WindowOutsideGap : Error { using Error::Error; };
struct ScheduleTooShort : Error { using Error::Error; };
struct ComplexPotential : Error { using Error::Error; };

// Job-file problems; `field` is a JSON-pointer-like path to the offending key.
struct SchemaError : Error {
  std::string field;
  SchemaError(std::string where, const std::string& what)
      : Error(where + ": " + what), field(std::move(where)) {}
};

}  // namespace diracbvp
