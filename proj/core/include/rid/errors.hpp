#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rid {

/// Malformed or out-of-contract input data (bad CSV, bad config, bad labels).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation exceeded a configured resource cap.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t partial_count)
      : std::runtime_error(what), partial_count_(partial_count) {}

  /// How many models had been produced when the cap tripped.
  std::size_t partial_count() const { return partial_count_; }

 private:
  std::size_t partial_count_;
};

}  // namespace rid
