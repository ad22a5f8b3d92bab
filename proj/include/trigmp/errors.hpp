#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace trigmp {

/// Argument outside an operation's domain (bad index, size mismatch, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or truncated input file. `offset` is the byte position where
/// parsing stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A pursuit loop gave up: projection did not converge within its cap, or
/// the residual stopped decreasing before reaching the target.
class PursuitAborted : public std::runtime_error {
 public:
  explicit PursuitAborted(const std::string& what) : std::runtime_error(what) {}
  PursuitAborted(const std::string& what, std::size_t block)
      : std::runtime_error("block " + std::to_string(block) + ": " + what), block_(block) {}

  std::optional<std::size_t> block() const noexcept { return block_; }

 private:
  std::optional<std::size_t> block_;
};

}  // namespace trigmp
