#pragma once

#include <stdexcept>
#include <string>

namespace seudep {

/// Error type thrown by all parsers and analyses in this library.
/// Messages carry enough location context (file key, state index,
/// token position) to act on without a debugger.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seudep
