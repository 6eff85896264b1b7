#pragma once

#include <stdexcept>
#include <string>

namespace modmig {

// Hard failure in a library operation. Soft conditions (unresolved includes,
// malformed directives) travel in diagnostics lists instead of throwing.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// A cross-library include cycle. Kept separate from plain errors so callers
// can map it to an analysis-finding exit status instead of a tool fault.
class LayeringViolation : public Error {
public:
  explicit LayeringViolation(const std::string &what) : Error(what) {}
};

} // namespace modmig
