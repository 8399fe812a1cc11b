#include "nugap/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nugap::io {

SystemSet parse_systems(const json& j) {
  if (!j.is_array()) throw InputError("system list must be a JSON array");
  SystemSet out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_object()) throw InputError("system " + std::to_string(i) + " is not an object");
    out.ids.push_back(e.contains("id") ? e.at("id").get<std::string>() : "G" + std::to_string(i));
    try {
      out.systems.push_back(tf_from_json(e));
    } catch (const std::exception& ex) {
      throw InputError("system " + out.ids.back() + ": " + ex.what());
    }
  }
  return out;
}

SystemSet read_systems(const std::filesystem::path& path) { return parse_systems(read_json(path)); }

json tf_to_json(const lti::RationalTF& g) {
  json num = json::array(), den = json::array();
  for (double c : g.num().coeffs()) num.push_back(c);
  if (g.num().is_zero()) num.push_back(0.0);
  for (double c : g.den().coeffs()) den.push_back(c);
  return {{"num", num}, {"den", den}};
}

lti::RationalTF tf_from_json(const json& j) {
  if (!j.contains("num") || !j.contains("den")) throw InputError("missing num or den");
  const auto num = j.at("num").get<std::vector<double>>();
  const auto den = j.at("den").get<std::vector<double>>();
  for (double c : num) {
    if (!std::isfinite(c)) throw InputError("non-finite coefficient");
  }
  for (double c : den) {
    if (!std::isfinite(c)) throw InputError("non-finite coefficient");
  }
  return lti::tf_make(num, den);
}

json systems_to_json(const SystemSet& set) {
  json out = json::array();
  for (std::size_t i = 0; i < set.systems.size(); ++i) {
    json e = tf_to_json(set.systems[i]);
    e["id"] = set.ids[i];
    out.push_back(std::move(e));
  }
  return out;
}

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string format9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format9(r[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace nugap::io
