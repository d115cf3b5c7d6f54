#pragma once

#include <stdexcept>
#include <string>

namespace ab {

// Every library failure is reported through this type. The message names the
// offending mode, fluxon, or parameter.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ab
