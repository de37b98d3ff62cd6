#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace iseval {

/// Precondition violated by caller-supplied data (duplicate cards, bad shapes, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed textual input. Carries the offending character when there is one.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, char offending)
      : InvalidInput(what), offending_(offending) {}
  explicit ParseError(const std::string& what) : InvalidInput(what) {}

  char offending() const noexcept { return offending_; }

 private:
  char offending_ = '\0';
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a provider cannot supply an exact value for an observable.
class NoGroundTruth : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A provider call failed while labelling one example of a dataset.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& what, std::size_t example)
      : std::runtime_error("example " + std::to_string(example) + ": " + what), example_(example) {}

  std::size_t example_index() const noexcept { return example_; }

 private:
  std::size_t example_;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, std::uint64_t update)
      : std::runtime_error(what), update_(update) {}

  std::uint64_t update() const noexcept { return update_; }

 private:
  std::uint64_t update_;
};

}  // namespace iseval
