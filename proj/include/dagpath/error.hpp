#pragma once

#include <stdexcept>
#include <string>

namespace dagpath {

// Bad input data, files, or prior knowledge. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad command-line usage. The CLI maps this to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dagpath
