#pragma once

#include <string>

#include <json.hpp>

namespace affdim {

/// Dumps JSON with every floating-point value rendered with 17 significant
/// digits (nlohmann's default is shortest round-trip). Non-finite values
/// become null.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// "%.17g" rendering shared by the JSON and CSV writers.
std::string format_double(double x);

}  // namespace affdim
