#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "snc/code.hpp"
#include "snc/modes.hpp"

namespace snc::experiments {

// Invalid sweep configuration (exit status 1).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Output could not be written (exit status 2).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

std::string_view version();

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "SNC_OUTPUT_DIR";

struct EpsilonGrid {
  double min = 0.1;
  double max = 0.3;
  double step = 0.05;

  // min, min+step, ... up to max (inclusive within 1e-9), rounded to 1e-9.
  std::vector<double> values() const;
};

enum class Metric { Error, Latency, Length };

struct SweepConfig {
  std::string experiment = "custom";
  std::vector<double> epsilons;  // explicit grid; empty is a config error
  std::vector<CodeParams> codes;
  std::vector<ModeConfig> modes;
  int mode_n = 12;                    // block length used for residual window accounting
  std::vector<int> mode_memories{0};  // L values each mode is simulated at
  std::vector<Metric> metrics{Metric::Error};
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::filesystem::path out_dir = ".";
  bool emit_csv = true;
  bool emit_json = true;

  // Throws ConfigError.
  void validate() const;
};

SweepConfig preset(std::string_view name);  // fig1 | fig2 | fig3 | fig4
std::vector<std::string> preset_names();

// Overlays keys present in `j` onto `base`. Throws ConfigError on bad values.
SweepConfig apply_json(SweepConfig base, const nlohmann::json& j);
nlohmann::json to_json(const SweepConfig& cfg);

struct Row {
  double epsilon = 0.0;
  std::string series;
  double value = 0.0;
  std::optional<double> std_error;  // simulated points only
};

// All series of the sweep, series-major then ascending epsilon.
std::vector<Row> evaluate(const SweepConfig& cfg);

// RFC 4180 style: header row, LF line endings.
void write_csv(std::ostream& os, const std::vector<Row>& rows);

struct RunResult {
  std::vector<Row> rows;
  std::optional<std::filesystem::path> csv_path;
  std::optional<std::filesystem::path> json_path;
};

// Evaluates the sweep and writes <out_dir>/<experiment>.csv and .json.
RunResult run(const SweepConfig& cfg);

enum class VerifyLevel { Quick, Exhaustive };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Quick;
  bool inject_fault = false;  // replace P_1 by P_0 in the MDP check
  unsigned threads = 0;
};

struct Check {
  std::string name;
  bool passed = false;
  double deviation = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool passed() const;
};

VerifyReport verify(const VerifyOptions& options, std::ostream* progress = nullptr);

}  // namespace snc::experiments
