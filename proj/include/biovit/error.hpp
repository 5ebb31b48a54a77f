#pragma once

#include <stdexcept>
#include <string>

namespace biovit {

// Raised for precondition violations and unfittable inputs across the toolkit.
// Data-level corruption in capture streams is reported through FrameError
// values instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace biovit
