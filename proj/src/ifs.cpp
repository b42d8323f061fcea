#include "affdim/ifs.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "affdim/errors.hpp"
#include "affdim/json_format.hpp"

namespace affdim {

using nlohmann::json;

namespace {

double read_number(const json& v, const std::string& where,
                   std::optional<std::size_t> index) {
  if (!v.is_number()) {
    throw ValidationError(where + ": expected a number", index);
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ValidationError(where + ": non-finite entry", index);
  }
  return x;
}

Mat2 read_matrix(const json& v, const std::string& where,
                 std::optional<std::size_t> index) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_array() || !v[1].is_array() ||
      v[0].size() != 2 || v[1].size() != 2) {
    throw ValidationError(where + ": expected [[a,b],[c,d]]", index);
  }
  return {read_number(v[0][0], where, index), read_number(v[0][1], where, index),
          read_number(v[1][0], where, index), read_number(v[1][1], where, index)};
}

json write_matrix(const Mat2& m) { return json::array({{m.a, m.b}, {m.c, m.d}}); }

}  // namespace

void validate_system(const IfsSystem& system) {
  if (system.maps.empty()) {
    throw ValidationError("system has no maps");
  }
  for (std::size_t i = 0; i < system.maps.size(); ++i) {
    const Mat2& m = system.maps[i];
    for (std::size_t k = 0; k < 4; ++k) {
      if (!std::isfinite(m.entry(k))) {
        throw ValidationError("map " + std::to_string(i) + " has a non-finite entry", i);
      }
    }
    if (m.det() == 0.0) {
      throw ValidationError("map " + std::to_string(i) + " singular", i);
    }
  }
  if (system.translations && system.translations->size() != system.maps.size()) {
    throw ValidationError("translation count " + std::to_string(system.translations->size()) +
                          " does not match map count " + std::to_string(system.maps.size()));
  }
  if (system.basis && system.basis->det() == 0.0) {
    throw ValidationError("basis matrix singular");
  }
}

IfsSystem parse_system(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("maps") || !doc["maps"].is_array()) {
    throw ValidationError("malformed document: expected an object with a \"maps\" array");
  }
  IfsSystem system;
  const json& maps = doc["maps"];
  std::size_t with_translation = 0;
  std::vector<Vec2> translations;
  std::optional<std::size_t> mismatch;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const json& entry = maps[i];
    const std::string where = "map " + std::to_string(i);
    if (!entry.is_object() || !entry.contains("matrix")) {
      throw ValidationError(where + ": missing \"matrix\"", i);
    }
    system.maps.push_back(read_matrix(entry["matrix"], where, i));
    if (entry.contains("translation")) {
      const json& t = entry["translation"];
      if (!t.is_array() || t.size() != 2) {
        throw ValidationError(where + ": translation must be [x,y]", i);
      }
      translations.push_back({read_number(t[0], where, i), read_number(t[1], where, i)});
      ++with_translation;
    }
    if (!mismatch && entry.contains("translation") != maps[0].contains("translation")) {
      mismatch = i;
    }
  }
  if (with_translation > 0) {
    if (with_translation != system.maps.size()) {
      throw ValidationError("translation-length mismatch: " + std::to_string(with_translation) +
                            " translations for " + std::to_string(system.maps.size()) + " maps",
                            mismatch);
    }
    system.translations = std::move(translations);
  }
  if (doc.contains("basis")) {
    system.basis = read_matrix(doc["basis"], "basis", std::nullopt);
  }
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) {
      throw ValidationError("label must be a string");
    }
    system.label = doc["label"].get<std::string>();
  }
  validate_system(system);
  return system;
}

IfsSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot read input file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

std::string serialize_system(const IfsSystem& system) {
  json doc = json::object();
  json maps = json::array();
  for (std::size_t i = 0; i < system.maps.size(); ++i) {
    json entry = {{"matrix", write_matrix(system.maps[i])}};
    if (system.translations) {
      const Vec2& t = (*system.translations)[i];
      entry["translation"] = json::array({t[0], t[1]});
    }
    maps.push_back(std::move(entry));
  }
  doc["maps"] = std::move(maps);
  if (system.basis) {
    doc["basis"] = write_matrix(*system.basis);
  }
  if (!system.label.empty()) {
    doc["label"] = system.label;
  }
  return dump_json(doc);
}

Mat2 word_product(const IfsSystem& system, const Word& word) {
  if (word.indices.empty()) {
    throw std::invalid_argument("word_product: empty word");
  }
  Mat2 product = Mat2::identity();
  for (std::size_t idx : word.indices) {
    if (idx >= system.maps.size()) {
      throw std::out_of_range("word_product: index " + std::to_string(idx) +
                              " out of range for " + std::to_string(system.maps.size()) + " maps");
    }
    product = product * system.maps[idx];
  }
  return product;
}

IfsSystem conjugate_system(const IfsSystem& system, const Mat2& basis) {
  if (basis.det() == 0.0) {
    throw std::domain_error("conjugate_system: basis is singular");
  }
  const Mat2 inv = basis.inverse();
  IfsSystem out;
  out.maps.reserve(system.maps.size());
  for (const Mat2& m : system.maps) {
    out.maps.push_back(basis * m * inv);
  }
  out.label = system.label.empty() ? std::string("conjugated") : system.label + " (conjugated)";
  return out;
}

double parameter(const IfsSystem& system, std::size_t k) {
  if (k >= system.parameter_count()) {
    throw std::out_of_range("parameter index " + std::to_string(k) + " out of range");
  }
  return system.maps[k / 4].entry(k % 4);
}

IfsSystem with_parameter(const IfsSystem& system, std::size_t k, double value) {
  if (k >= system.parameter_count()) {
    throw std::out_of_range("parameter index " + std::to_string(k) + " out of range");
  }
  IfsSystem out = system;
  out.maps[k / 4].entry(k % 4) = value;
  return out;
}

std::string system_digest(const std::vector<Mat2>& maps) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Mat2& m : maps) {
    for (std::size_t k = 0; k < 4; ++k) {
      std::uint64_t bits = 0;
      const double x = m.entry(k);
      std::memcpy(&bits, &x, sizeof bits);
      for (int byte = 0; byte < 8; ++byte) {
        h ^= (bits >> (8 * byte)) & 0xffU;
        h *= 1099511628211ULL;
      }
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace affdim
