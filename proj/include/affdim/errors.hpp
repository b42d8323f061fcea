#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace affdim {

/// Input refused: malformed document, singular map, violated hypothesis.
/// Carries the offending generator index when one is known.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what,
                           std::optional<std::size_t> map_index = std::nullopt);

  std::optional<std::size_t> map_index() const noexcept { return map_index_; }

 private:
  std::optional<std::size_t> map_index_;
};

}  // namespace affdim
