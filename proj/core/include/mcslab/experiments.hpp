#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcslab/error.hpp"
#include "mcslab/manifold.hpp"
#include "mcslab/types.hpp"

namespace mcs {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitAssertionFailed = 3;

const std::vector<std::string>& experiment_kinds();

struct ManifoldSpec {
  std::string family = "circle";  // circle | pulse | complex_exponential | segment
  double kappa = 1.0;             // circle radius
  double sigma = 0.05;            // pulse width
  int max_frequency = 3;          // complex exponential f_C
  Index N = 256;                  // ambient dimension (derived for complex_exponential)
};

ManifoldModel make_model(const ManifoldSpec& spec);

/// Fully defaulted experiment configuration.  Which fields a kind reads (and
/// echoes into its manifest) is fixed per kind; see config_to_json.
struct ExperimentConfig {
  std::string kind;
  ManifoldSpec manifold;
  std::uint64_t seed = 1;
  std::string output = "out";
  unsigned threads = 0;  // 0: not set; runs use 1

  Index M = 64;
  std::vector<Index> M_list{8, 32, 128};
  Index trials = 100;
  Index samples = 2000;  // manifold sample size
  Index secants = 10000;
  double delta = 0.1;  // secant resolution used to classify short chords
  double distance = 0.05;
  double noise = 0.01;
  Index grid = 1024;
  double tol = 1e-9;
  double pass_rate = 0.95;
  Index pair_budget = 1000;
  std::vector<std::string> properties;

  int K = 1;
  double tau = 1.0;
  double volume = 6.283185307179586;
  double epsilon = 1.0 / 3.0;
  double rho = 0.01;
  int J = 60;
  std::optional<std::int64_t> certificate_M;  // defaults to the measurement bound
};

struct ConfigIssue {
  int line = 0;  // 1-based; 0 when the issue has no location
  std::string field;
  std::string message;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string source, std::vector<ConfigIssue> issues);

  const std::string& source() const { return source_; }
  const std::vector<ConfigIssue>& issues() const { return issues_; }
  /// One `source:line: field: message` line per issue.
  std::string report() const;

 private:
  std::string source_;
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates JSON text.  Unknown keys, type mismatches and
/// out-of-range values are collected and thrown together as a ConfigError.
/// When `kind` is given it must agree with the config's own "kind" key, which
/// may then be omitted.
ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::optional<std::string>& kind = std::nullopt);

/// Reads a file and calls parse_config.  A missing file is an io-error.
ExperimentConfig validate_config(const std::string& path,
                                 const std::optional<std::string>& kind = std::nullopt);

/// Resolved configuration as pretty-printed JSON, restricted to the fields the
/// kind uses.  Thread count and output directory are execution settings and
/// are left out so that manifests do not depend on them.
std::string config_to_json(const ExperimentConfig& config);

/// Runs the experiment, writing artifacts and manifest.json into
/// config.output (created if missing).  Returns kExitSuccess,
/// kExitConfigError or kExitAssertionFailed.
int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// CRC-32 (IEEE) of a file's bytes, as eight lowercase hex digits.
std::string file_crc32(const std::string& path);

}  // namespace mcs
