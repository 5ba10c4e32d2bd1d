#ifndef POLT_DATAGEN_HPP_
#define POLT_DATAGEN_HPP_

#include "polt/core.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace polt {

enum class GeneratorKind { SeparableMargin, NoisyMargin, GaussianClusters };

std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::SeparableMargin;
  std::size_t d = 5;
  double R = 1.0;
  // Probability of a +1 label (margin kinds).
  double balance = 0.5;
  std::uint64_t seed = 0;
  // Pairwise margin: <u, x+ - x-> >= gamma for every mixed pair.
  double gamma = 0.2;
  double flip_prob = 0.0;
  // Offset b of the separating hyperplane is drawn from [-max_offset, max_offset].
  // The default 0 keeps the hyperplane through the origin, which is what the
  // perceptron comparator needs.
  double max_offset = 0.0;
  // GaussianClusters.
  std::size_t k = 3;
  double spread = 0.1;

  void validate() const;
};

/// A fixed draw of the generator's latent structure (witness direction,
/// offset, cluster centres) from which any number of i.i.d. streams can be
/// sampled.
class Generator {
 public:
  explicit Generator(const GeneratorSpec& spec);

  const GeneratorSpec& spec() const { return spec_; }
  const Vector& witness() const { return witness_; }
  double offset() const { return offset_; }
  const std::vector<Vector>& centers() const { return centers_; }

  /// n i.i.d. examples; deterministic in (spec, stream_seed).
  Dataset sample(std::size_t n, std::uint64_t stream_seed) const;

 private:
  Example draw_margin(std::mt19937_64& rng) const;
  Vector draw_ball(std::mt19937_64& rng) const;

  GeneratorSpec spec_;
  Vector witness_;
  double offset_ = 0.0;
  std::vector<Vector> centers_;
};

struct GeneratedData {
  Dataset data;
  Vector witness;
  double offset = 0.0;
  std::vector<Vector> centers;
};

/// The stream for `spec`, sampled with a seed derived from spec.seed.
GeneratedData generate(const GeneratorSpec& spec, std::size_t n);

/// SplitMix64 mix of (base, salt); used to derive independent seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header `label,f1,...,fd`, then one row per example with the integer
/// label and 17-significant-digit features.
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Inverse of save_csv. An empty file is an error; a header-only file is an
/// empty dataset.
Dataset load_csv(const std::filesystem::path& path);

}  // namespace polt

#endif  // POLT_DATAGEN_HPP_
