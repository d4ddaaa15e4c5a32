#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "popper/cli.hpp"

using namespace popper::cli;
using doctest::Approx;
using nlohmann::json;

namespace {

const std::string kDir = POPPER_SCENARIO_DIR;

struct Captured {
  int code;
  std::string out;
  std::string err;
};

template <class F>
Captured capture(F&& f) {
  std::ostringstream out, err;
  const int code = f(out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("run on the bundled Kim-Shih scenario") {
  const auto r = capture([](auto& o, auto& e) { return cmd_run(kDir + "/kim_shih.json", {}, o, e); });
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["results"]["coincidence_fwhm_mm"]["analytic"].get<double>() == Approx(0.657).epsilon(0.01));
  CHECK(doc["results"]["fit"]["a2_mm2"].get<double>() == Approx(0.043).epsilon(0.03));
  CHECK(doc.contains("conventions"));
  CHECK(doc["tool"]["version"] == version());
  CHECK(doc["scenario"]["slit"]["epsilon_mm"].get<double>() == 0.065);

  const auto again = capture([](auto& o, auto& e) { return cmd_run(kDir + "/kim_shih.json", {}, o, e); });
  CHECK(again.out == r.out);
}

TEST_CASE("run with the oracle reports deltas") {
  CommonFlags f;
  f.oracle = true;
  const auto r = capture([&](auto& o, auto& e) { return cmd_run(kDir + "/popper_freespace.json", f, o, e); });
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["results"]["provenance"] == "both");
  CHECK(std::abs(doc["results"]["coincidence_fwhm_mm"]["relative_delta"].get<double>()) < 0.001);
  CHECK(doc["results"]["oracle_grid"]["n"] == 2048);

  f.grid_n = 1024;
  const auto coarse = capture([&](auto& o, auto& e) { return cmd_run(kDir + "/popper_freespace.json", f, o, e); });
  CHECK(coarse.code == kExitResolution);
  CHECK(coarse.err.find("needs n >= 2048") != std::string::npos);
}

TEST_CASE("run error exits") {
  CHECK(capture([](auto& o, auto& e) { return cmd_run(kDir + "/missing.json", {}, o, e); }).code == kExitConfig);

  const auto bad = temp_file("popper_bad.json", "{\n \"name\": \"x\",\n \"a_mm\": ,\n}");
  const auto r = capture([&](auto& o, auto& e) { return cmd_run(bad.string(), {}, o, e); });
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(r.err.find("column") != std::string::npos);

  const auto tiny = temp_file("popper_tiny.json", R"({"name":"tiny","a_mm":0.2,"omega_mm":2,
      "slit":{"kind":"gaussian","width_mm":0.1},"L1_mm":300,"L2_mm":300,"oracle":{"n":256,"extent_mm":3}})");
  CHECK(capture([&](auto& o, auto& e) { return cmd_run(tiny.string(), {}, o, e); }).code == kExitResolution);

  CommonFlags f;
  f.out = "/nonexistent-dir/report.json";
  CHECK(capture([&](auto& o, auto& e) { return cmd_run(kDir + "/kim_shih.json", f, o, e); }).code == kExitConfig);
}

TEST_CASE("run writes --out and --csv files") {
  CommonFlags f;
  f.out = (std::filesystem::temp_directory_path() / "popper_report.json").string();
  f.csv = (std::filesystem::temp_directory_path() / "popper_report.csv").string();
  const auto r = capture([&](auto& o, auto& e) { return cmd_run(kDir + "/kim_shih.json", f, o, e); });
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream j(*f.out), c(*f.csv);
  CHECK(json::parse(j)["scenario"]["name"] == "kim_shih");
  std::string header;
  std::getline(c, header);
  CHECK(header == "quantity,analytic_mm,oracle_mm,relative_delta");
}

TEST_CASE("sweep") {
  SUBCASE("monotone decreasing over the Strekalov scenario") {
    const auto r = capture([](auto& o, auto& e) {
      return cmd_sweep(kDir + "/strekalov.json", SweepFlags{"slit_full_width", 0.1, 1.0, 10}, {}, o, e);
    });
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 11);
    CHECK(rows[0] == "slit_full_width_mm,fwhm_analytic_mm");
    double prev_w = 0, prev_f = 1e9;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto comma = rows[i].find(',');
      const double w = std::stod(rows[i].substr(0, comma));
      const double f = std::stod(rows[i].substr(comma + 1));
      CHECK(w > prev_w);
      CHECK(f < prev_f);
      prev_w = w;
      prev_f = f;
    }
  }
  SUBCASE("two steps give two rows") {
    const auto r = capture([](auto& o, auto& e) {
      return cmd_sweep(kDir + "/strekalov.json", SweepFlags{"slit_full_width", 0.2, 0.4, 2}, {}, o, e);
    });
    CHECK(lines(r.out).size() == 3);
  }
  SUBCASE("invalid bounds") {
    for (const SweepFlags& s : {SweepFlags{"slit_full_width", 1.0, 0.1, 5}, SweepFlags{"slit_full_width", 0.1, 1.0, 1},
                                SweepFlags{"slit_full_width", 0.0, 1.0, 5}, SweepFlags{"lambda", 0.1, 1.0, 5}}) {
      CHECK(capture([&](auto& o, auto& e) { return cmd_sweep(kDir + "/strekalov.json", s, {}, o, e); }).code ==
            kExitConfig);
    }
  }
  SUBCASE("failed inference is flagged and the sweep continues") {
    const auto p = temp_file("popper_sweep.json", R"({"name":"s","a_mm":0.04,"omega_mm":10,
        "slit":{"kind":"rectangular","width_mm":0.2,"convention":"half_width"},"L1_mm":600,"L2_mm":600,
        "observed_coincidence_fwhm_mm":4.0})");
    const auto r = capture([&](auto& o, auto& e) {
      return cmd_sweep(p.string(), SweepFlags{"slit_full_width", 0.1, 1.0, 4}, {}, o, e);
    });
    CHECK(r.code == kExitOk);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "slit_full_width_mm,fwhm_analytic_mm,fitted_a2_mm2,status");
    CHECK(rows[1].find(",ok") != std::string::npos);
    CHECK(rows[4].find("fit_failed") != std::string::npos);
    CHECK(r.err.find("flagged") != std::string::npos);
  }
  SUBCASE("oracle column") {
    CommonFlags f;
    f.oracle = true;
    const auto p = temp_file("popper_sweep_small.json", R"({"name":"s","a_mm":0.2,"omega_mm":2,
        "slit":{"kind":"rectangular","width_mm":0.2,"convention":"half_width"},"L1_mm":200,"L2_mm":200})");
    const auto r = capture([&](auto& o, auto& e) {
      return cmd_sweep(p.string(), SweepFlags{"slit_full_width", 0.2, 0.6, 3}, f, o, e);
    });
    REQUIRE(r.code == kExitOk);
    CHECK(lines(r.out)[0] == "slit_full_width_mm,fwhm_analytic_mm,fwhm_oracle_mm,status");
  }
}

TEST_CASE("fit") {
  const auto r = capture([](auto& o, auto& e) { return cmd_fit(FitFlags{0.657, 0.065, 500.0, 702.0, "near"}, {}, o, e); });
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["results"]["a2_mm2"].get<double>() == Approx(0.043).epsilon(0.03));
  CHECK(doc["results"]["s_far_mm"].get<double>() == Approx(0.5139).epsilon(1e-3));
  CHECK(capture([](auto& o, auto& e) { return cmd_fit(FitFlags{0.1, 0.0, 500.0, 702.0, "near"}, {}, o, e); }).code ==
        kExitConfig);
  CHECK(capture([](auto& o, auto& e) { return cmd_fit(FitFlags{0.657, 0.065, 500.0, 702.0, "middle"}, {}, o, e); })
            .code == kExitConfig);
}

TEST_CASE("spin") {
  const auto dist = [](const json& j) { return std::vector<double>{j[0], j[1], j[2]}; };
  SUBCASE("preset") {
    const auto r = capture([](auto& o, auto& e) { return cmd_spin(SpinFlags{{}, {}, "ninety"}, {}, o, e); });
    const auto alias = capture([](auto& o, auto& e) { return cmd_spin(SpinFlags{{}, {}, "eq2"}, {}, o, e); });
    CHECK(alias.out == r.out);
    REQUIRE(r.code == kExitOk);
    const auto doc = json::parse(r.out);
    const auto m = dist(doc["results"]["marginal"]["B_z"]);
    CHECK(m[0] == Approx(0.05));
    CHECK(m[1] == Approx(0.9));
    const auto c = dist(doc["results"]["conditional_on_A_x"]["0"]["B_z"]);
    CHECK(c[0] == Approx(0.5));
    CHECK(c[1] == Approx(0.0));
    CHECK(c[2] == Approx(0.5));
  }
  SUBCASE("product state") {
    const auto r = capture([](auto& o, auto& e) { return cmd_spin(SpinFlags{0.0, 1.0, {}}, {}, o, e); });
    REQUIRE(r.code == kExitOk);
    const auto doc = json::parse(r.out);
    CHECK(dist(doc["results"]["marginal"]["B_z"]) == std::vector<double>{0, 1, 0});
    for (const char* k : {"+1", "-1"}) CHECK(dist(doc["results"]["conditional_on_A_x"][k]["B_z"]) == std::vector<double>{0, 1, 0});
    CHECK(doc["results"]["conditional_on_A_x"]["0"]["B_z"].is_null());
  }
  SUBCASE("eight-decimal input") {
    const auto r = capture([](auto& o, auto& e) { return cmd_spin(SpinFlags{0.70710678, 0.0, {}}, {}, o, e); });
    REQUIRE(r.code == kExitOk);
    const auto m = dist(json::parse(r.out)["results"]["marginal"]["B_z"]);
    CHECK(m[0] == Approx(0.5));
    CHECK(m[1] == 0.0);
    CHECK(m[2] == Approx(0.5));
  }
  SUBCASE("normalization violation") {
    CHECK(capture([](auto& o, auto& e) { return cmd_spin(SpinFlags{0.5, 0.5, {}}, {}, o, e); }).code == kExitConfig);
    CHECK(capture([](auto& o, auto& e) { return cmd_spin(SpinFlags{{}, {}, "eq9"}, {}, o, e); }).code == kExitConfig);
    CHECK(capture([](auto& o, auto& e) { return cmd_spin(SpinFlags{0.1, {}, {}}, {}, o, e); }).code == kExitConfig);
  }
}

TEST_CASE("oracle-check") {
  CommonFlags f;
  f.grid_n = 1024;
  const auto r = capture([&](auto& o, auto& e) { return cmd_oracle_check(kDir + "/kim_shih.json", f, o, e); });
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["all_pass"] == true);
  CHECK(doc["checks"].size() == 4);
}
