#pragma once

#include <stdexcept>
#include <string>

namespace causalsvm {

// Configuration / contract violations map to std::invalid_argument.
// These two carry the remaining CLI exit-code classes.

class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace causalsvm
