#pragma once

// Subcommands of popper_sim.  Each writes its report to `out` (or the file named by
// --out / --csv) and diagnostics to `err`, and returns the process exit code.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace popper::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitResolution = 3;

struct CommonFlags {
  std::optional<std::string> out;
  std::optional<std::string> csv;
  bool oracle = false;
  std::optional<std::size_t> grid_n;
};

struct SweepFlags {
  std::string param = "slit_full_width";
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
};

struct FitFlags {
  double fwhm = 0.0;
  double epsilon = 0.0;
  double distance = 0.0;
  double lambda_nm = 702.0;
  std::string branch = "near";
};

struct SpinFlags {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::string> preset;
};

int cmd_run(const std::string& scenario_path, const CommonFlags& flags, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& scenario_path, const SweepFlags& sweep, const CommonFlags& flags, std::ostream& out,
              std::ostream& err);
int cmd_fit(const FitFlags& fit, const CommonFlags& flags, std::ostream& out, std::ostream& err);
int cmd_spin(const SpinFlags& spin, const CommonFlags& flags, std::ostream& out, std::ostream& err);
int cmd_oracle_check(const std::string& scenario_path, const CommonFlags& flags, std::ostream& out,
                     std::ostream& err);

const char* version();

}  // namespace popper::cli
