#pragma once

#include <stdexcept>
#include <string>

namespace lingrank {

// Raised for malformed inputs and violated preconditions. The CLI maps it to
// exit code 2 ("data error").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lingrank
