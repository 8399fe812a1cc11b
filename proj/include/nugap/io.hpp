#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nugap/rational.hpp"

namespace nugap::io {

using nlohmann::json;

/// Malformed or unreadable input. The CLI maps it to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemSet {
  std::vector<std::string> ids;
  std::vector<lti::RationalTF> systems;
};

/// Parses a JSON array of {"id", "num", "den"} objects (coefficients in
/// descending powers). Missing ids default to "G<i>".
SystemSet parse_systems(const json& j);
SystemSet read_systems(const std::filesystem::path& path);

json tf_to_json(const lti::RationalTF& g);
lti::RationalTF tf_from_json(const json& j);
json systems_to_json(const SystemSet& set);

/// Numbers as JSON numbers; non-finite values as the strings "inf", "-inf"
/// or "nan".
json number(double v);

/// printf("%.9g").
std::string format9(double v);

/// Writes `content`, creating parent directories. Failures name the path.
void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// Rows of numeric cells under a header line.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace nugap::io
