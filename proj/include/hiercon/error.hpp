#pragma once

#include <stdexcept>
#include <string>

namespace hiercon {

/// Structural problem in an input document (hierarchy file, corpus record, config).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A name or path that does not exist where it was looked up.
class LookupError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The caller broke an operation's precondition.
class UsageError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace hiercon
