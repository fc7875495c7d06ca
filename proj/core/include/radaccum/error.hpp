#pragma once

#include <stdexcept>
#include <string>

namespace radaccum {

// Every failure raised by the library derives from this type, so callers can
// separate domain errors from programming errors (std::logic_error etc.).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace radaccum
