#ifndef POLT_HARNESS_HPP_
#define POLT_HARNESS_HPP_

#include "polt/core.hpp"
#include "polt/datagen.hpp"
#include "polt/learners.hpp"
#include "polt/oracle.hpp"
#include "polt/selection.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polt {

using Json = nlohmann::json;

/// Bad configuration: unknown key, wrong type, out-of-range value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Name of the one-pair-per-round baseline learner.
inline constexpr const char* kNaivePair = "naive-pair";

struct ExperimentConfig {
  GeneratorSpec generator;
  std::size_t n = 2000;
  // A learner kind name, or "naive-pair".
  std::string learner = "oam-infinite";
  // Learner R; unset means the generator radius (twice it for metric
  // learning, where R bounds pairwise differences).
  std::optional<double> learner_R;
  double U = 1.0;
  std::size_t T = 0;
  std::optional<std::size_t> capacity;
  BufferStrategy strategy = BufferStrategy::Fifo;
  bool literal_update_sign = false;
  bool literal_buffer_normalizer = false;
  std::size_t snapshot_stride = 1;
  double c = 0.1;
  double delta = 0.05;
  // When set, delta is derived from it.
  std::optional<double> epsilon;
  std::size_t repetitions = 1;
  std::size_t monte_carlo_m = 5000;
  std::size_t holdout_m = 1000;
  // Comparator margin; unset means the generator gamma.
  std::optional<double> margin;
  OracleMethod oracle_method = OracleMethod::Ellipsoid;
  std::string output_dir;
  // Existing CSV stream (with its generator sidecar) instead of fresh draws.
  std::string data;
  // Required unless `data` supplies one through its sidecar.
  std::optional<std::uint64_t> seed;
  // Worker cap, 0 = POLT_THREADS or hardware. Does not affect results.
  std::size_t threads = 0;

  bool naive_pair() const { return learner == kNaivePair; }
  /// The learner as run; for naive-pair this is the OAM configuration it
  /// is compared against.
  LearnerConfig learner_config() const;
  void validate() const;
};

/// Strict parse: unknown keys and mistyped values raise ConfigError.
ExperimentConfig parse_config(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);

/// Generator sidecar written next to generated CSVs.
struct GeneratorMeta {
  GeneratorSpec spec;
  std::size_t n = 0;
  Vector witness;
  double offset = 0.0;
};
std::filesystem::path meta_path_for(const std::filesystem::path& csv);
void write_generator_meta(const GeneratorMeta& meta, const std::filesystem::path& path);
GeneratorMeta read_generator_meta(const std::filesystem::path& path);
Json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const Json& j);

/// Baseline that consumes the stream in disjoint pairs: on even rounds t it
/// makes one OAM update against z_{t-1} alone; odd rounds only store.
RunTrace run_naive_pair(const LearnerConfig& cfg, std::span<const Example> stream);

struct VerifyOutcome {
  Json report;
  bool all_satisfied = true;
};

/// Runs every applicable check for the configured learner over all
/// repetitions. The report is a pure function of the configuration.
VerifyOutcome verify_bounds(const ExperimentConfig& cfg);

/// Merges verify-bounds reports: concatenates repetitions, recomputes the
/// aggregate, and averages the per-round series.
Json merge_reports(const std::vector<Json>& reports);

/// Plot data from a (merged) report: t, M_t, cumulative loss, bound.
std::string plot_csv(const Json& report);

Json selection_to_json(const SelectionResult& result);

/// Two-space indent plus trailing newline.
std::string dump_json(const Json& j);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace polt

#endif  // POLT_HARNESS_HPP_
