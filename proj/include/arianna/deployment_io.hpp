#pragma once

// On-disk repository format for deployments (also the offline download payload).

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "arianna/pathgraph.hpp"
#include "json.hpp"

namespace arianna {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json deployment_to_json(const Deployment& d);
/// Throws FormatError on missing keys, bad colours, or wrong types.
Deployment deployment_from_json(const Json& j);

/// Canonical text: two-space indent, coordinates rounded to millimetres, trailing newline.
std::string serialize_deployment(const Deployment& d);
Deployment parse_deployment(std::string_view text);

Deployment load_deployment(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

Json validation_to_json(const ValidationReport& r);

Json vec_to_json(Vec2 p);
Vec2 vec_from_json(const Json& j);

}  // namespace arianna
