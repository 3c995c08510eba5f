#pragma once

#include <stdexcept>
#include <string>

namespace compcx {

// Thrown when an operation is called outside its documented domain.
// The message names the violated condition.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void expects(bool condition, const std::string& what) {
  if (!condition) throw precondition_error(what);
}

}  // namespace compcx
