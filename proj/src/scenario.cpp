#include "popper/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace popper {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view origin, const std::string& msg) {
  throw ConfigError(std::string(origin) + ": " + msg);
}

double number(const json& j, const char* key, std::string_view origin) {
  const auto it = j.find(key);
  if (it == j.end()) fail(origin, std::string("missing field '") + key + "'");
  if (!it->is_number()) fail(origin, std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) fail(origin, std::string("field '") + key + "' must be finite");
  return v;
}

std::optional<double> optional_number(const json& j, const char* key, std::string_view origin) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j, key, origin);
}

std::string text(const json& j, const char* key, std::string_view origin, std::string fallback = {}) {
  const auto it = j.find(key);
  if (it == j.end()) {
    if (fallback.empty()) fail(origin, std::string("missing field '") + key + "'");
    return fallback;
  }
  if (!it->is_string()) fail(origin, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

SlitSpec parse_slit(const json& j, double L2, const PhysParams& params, std::string_view origin) {
  if (!j.is_object()) fail(origin, "'slit' must be an object");
  const std::string kind = text(j, "kind", origin);
  if (kind == "open") return SlitSpec::open();
  const double width = number(j, "width_mm", origin);
  if (!(width > 0.0)) fail(origin, "slit.width_mm must be positive");
  if (kind == "gaussian") return SlitSpec::gaussian(width);
  if (kind != "rectangular") fail(origin, "slit.kind must be gaussian, rectangular or open");

  const std::string conv = text(j, "convention", origin, "half_width");
  if (conv == "half_width") return SlitSpec::rectangular(width, SlitConvention::half_width);
  if (conv != "diffraction_matched") fail(origin, "slit.convention must be half_width or diffraction_matched");
  std::optional<double> eps = optional_number(j, "epsilon_mm", origin);
  if (const auto ref = optional_number(j, "reference_fwhm_mm", origin)) {
    if (eps) fail(origin, "give slit.epsilon_mm or slit.reference_fwhm_mm, not both");
    if (!(L2 > 0.0)) fail(origin, "slit.reference_fwhm_mm needs L2_mm > 0");
    try {
      eps = match_epsilon_from_fwhm(*ref, L2, params);
    } catch (const DomainError& e) {
      fail(origin, std::string("slit.reference_fwhm_mm: ") + e.what());
    }
  }
  if (eps && !(*eps > 0.0)) fail(origin, "slit.epsilon_mm must be positive");
  return SlitSpec::rectangular(width, SlitConvention::diffraction_matched, eps);
}

}  // namespace

Scenario parse_scenario(std::string_view json_text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(json_text, byte);
    fail(origin, "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!doc.is_object()) fail(origin, "scenario must be a JSON object");

  try {
    Scenario s;
    s.name = text(doc, "name", origin);
    s.params = PhysParams::from_wavelength_nm(optional_number(doc, "lambda_nm", origin).value_or(702.0));
    const auto a = optional_number(doc, "a_mm", origin);
    const auto a2 = optional_number(doc, "a2_mm2", origin);
    if (a && a2) fail(origin, "give a_mm or a2_mm2, not both");
    if (!a && !a2) fail(origin, "missing field 'a_mm' or 'a2_mm2'");
    if ((a && *a < 0.0) || (a2 && *a2 < 0.0)) fail(origin, "a must be >= 0");
    s.a = a ? *a : std::sqrt(*a2);
    s.omega = number(doc, "omega_mm", origin);
    s.L1 = number(doc, "L1_mm", origin);
    s.L2 = number(doc, "L2_mm", origin);
    if (!doc.contains("slit")) fail(origin, "missing field 'slit'");
    s.slit = parse_slit(doc.at("slit"), s.L2, s.params, origin);
    if (doc.contains("lens") && !doc.at("lens").is_null()) {
      const json& lens = doc.at("lens");
      if (!lens.is_object()) fail(origin, "'lens' must be an object");
      s.lens.emplace(number(lens, "f_mm", origin), number(lens, "b1_mm", origin));
    }
    if (doc.contains("oracle") && !doc.at("oracle").is_null()) {
      const json& o = doc.at("oracle");
      if (!o.is_object()) fail(origin, "'oracle' must be an object");
      OracleConfig cfg;
      if (const auto n = optional_number(o, "n", origin)) {
        if (*n < 1.0 || *n != std::floor(*n)) fail(origin, "oracle.n must be a positive integer");
        cfg.n = static_cast<std::size_t>(*n);
      }
      cfg.extent = optional_number(o, "extent_mm", origin);
      s.oracle = cfg;
    }
    s.observed_coincidence_fwhm = optional_number(doc, "observed_coincidence_fwhm_mm", origin);
    if (doc.contains("outputs")) {
      if (!doc.at("outputs").is_array()) fail(origin, "'outputs' must be an array of strings");
      for (const json& item : doc.at("outputs")) {
        if (!item.is_string()) fail(origin, "'outputs' must be an array of strings");
        s.outputs.push_back(item.get<std::string>());
      }
    }
    s.validate();
    return s;
  } catch (const DomainError& e) {
    fail(origin, e.what());
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(std::string(origin), 0) == 0) throw;
    fail(origin, msg);
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace popper
