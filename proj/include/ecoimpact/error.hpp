#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecoimpact {

enum class ErrorKind {
  InvalidName,
  Parse,
  Ambiguity,
  NotFound,
  Domain,
  DegenerateScenario,
  Unreachable,
  Io,
  Format,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::Parse, what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace ecoimpact
