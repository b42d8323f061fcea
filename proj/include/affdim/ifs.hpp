#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affdim/mat2.hpp"

namespace affdim {

/// Planar affine IFS: linear parts, optional translations, and an optional
/// basis B for which every B A B^-1 is entrywise positive.
struct IfsSystem {
  std::vector<Mat2> maps;
  std::optional<std::vector<Vec2>> translations;
  std::optional<Mat2> basis;
  std::string label;

  std::size_t size() const { return maps.size(); }

  /// Number of real parameters t, four per generator in row-major order.
  std::size_t parameter_count() const { return 4 * maps.size(); }

  friend bool operator==(const IfsSystem&, const IfsSystem&) = default;
};

/// Checks the IfsSystem invariants; throws ValidationError naming the map.
void validate_system(const IfsSystem& system);

/// Parses the JSON input format:
///   {"maps": [{"matrix": [[a,b],[c,d]], "translation": [x,y]}, ...],
///    "basis": [[a,b],[c,d]], "label": "..."}
/// Throws ValidationError.
IfsSystem parse_system(std::string_view text);

/// Reads and parses a file. Throws ValidationError if unreadable.
IfsSystem load_system(const std::string& path);

/// Inverse of parse_system; numbers are written with 17 significant digits
/// so the round trip is exact.
std::string serialize_system(const IfsSystem& system);

/// A finite word over the generator alphabet.
struct Word {
  std::vector<std::size_t> indices;
};

/// A^(i1) A^(i2) ... A^(ik). Throws std::out_of_range on a bad index and
/// std::invalid_argument on an empty word.
Mat2 word_product(const IfsSystem& system, const Word& word);

/// Replaces every map A by B A B^-1. Translations are dropped and the label
/// is annotated. Throws std::domain_error if B is singular.
IfsSystem conjugate_system(const IfsSystem& system, const Mat2& basis);

/// Parameter t_k (0-based), i.e. entry k % 4 of map k / 4.
double parameter(const IfsSystem& system, std::size_t k);

/// Copy of the system with parameter k replaced. Does not validate.
IfsSystem with_parameter(const IfsSystem& system, std::size_t k, double value);

/// Short stable identifier of the linear parts (FNV-1a over the entries).
std::string system_digest(const std::vector<Mat2>& maps);

}  // namespace affdim
