#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace lexdiff::detail {

using nlohmann::json;

/// Parses `text` as JSON, rejecting duplicate object keys (which the DOM
/// parser would silently collapse). The error message of a duplicate names
/// its JSON pointer. Throws SchemaError on any failure.
json parse_strict(std::string_view text, std::string_view what);

/// Pointer to the first duplicated key, or nullopt. Requires well-formed JSON.
std::optional<std::string> first_duplicate_key(std::string_view text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace lexdiff::detail
