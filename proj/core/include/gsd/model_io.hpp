#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gsd/detector.hpp"

namespace gsd {

inline constexpr int kModelSchemaVersion = 1;

/// JSON document; reals use shortest round-trip formatting so a
/// deserialized model compares equal to the original.
std::string serialize_model(const GsdModel& model);

/// Throws ParseError (parse_error) on malformed or truncated input, with the
/// byte offset in column(), and unsupported_version for unknown schemas.
GsdModel deserialize_model(std::string_view text);

void save_model(const GsdModel& model, const std::filesystem::path& path);
GsdModel load_model(const std::filesystem::path& path);

}  // namespace gsd
