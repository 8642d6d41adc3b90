#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace symlog {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown by the formula/default parsers. Carries the byte offset of the
// offending token and the set of token descriptions that would have been
// accepted there.
struct ParseError : Error {
  ParseError(std::size_t offset, std::string found, std::vector<std::string> expected);
  std::size_t offset;
  std::string found;
  std::vector<std::string> expected;
};

struct UnboundVariableError : Error {
  UnboundVariableError(std::size_t offset, const std::string& name);
  std::size_t offset;
  std::string name;
};

struct UnknownRuleError : Error {
  explicit UnknownRuleError(const std::string& id)
      : Error("unknown rule id: " + id), id(id) {}
  std::string id;
};

// Oracle resource limits were exceeded (atom cap, ground-instance cap, ...).
// Oracles fail loudly instead of guessing.
struct CapExceededError : Error {
  explicit CapExceededError(const std::string& msg) : Error(msg) {}
};

struct CompositionError : Error {
  explicit CompositionError(const std::string& msg) : Error(msg) {}
};

struct LexiconError : Error {
  explicit LexiconError(const std::string& msg) : Error(msg) {}
};

struct GroundingError : Error {
  explicit GroundingError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(msg) {}
};

}  // namespace symlog
