#pragma once

#include <stdexcept>
#include <string>

namespace rawforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or invalid parameter/config value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// File contents do not follow the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace rawforge
