#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "popper/experiments.hpp"

namespace popper::cli::report {

using Json = nlohmann::ordered_json;

/// Rounds to 9 significant digits so the printed form is stable.
double sig9(double v);
Json number_or_null(std::optional<double> v);

Json conventions();
Json tool_block();
Json scenario_echo(const Scenario& s);
Json estimate(const Estimate& e);
Json fit_result(const FitResult& f);
/// Results of one scenario run; `outputs` restricts the width entries when non-empty.
Json width_report(const WidthReport& r, const std::vector<std::string>& outputs);

/// Document with tool + conventions blocks followed by `body`'s fields.
Json document(const Json& body);
void write(std::ostream& os, const Json& doc);

/// quantity,analytic_mm,oracle_mm,relative_delta rows for --csv.
void width_csv(std::ostream& os, const WidthReport& r);
void curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve, bool with_oracle, bool with_fit);

std::string format9(double v);

}  // namespace popper::cli::report
