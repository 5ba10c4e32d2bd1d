#include "polt/datagen.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polt {

namespace {

constexpr std::uint64_t kWitnessSalt = 0x5749544e455353ULL;
constexpr std::uint64_t kStreamSalt = 0x53545245414dULL;
constexpr std::uint64_t kFlipSalt = 0x464c4950ULL;
constexpr std::size_t kMaxAttempts = 1000000;

Vector gaussian_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return v;
}

Vector unit_vector(std::mt19937_64& rng, std::size_t d) {
  for (;;) {
    Vector v = gaussian_vector(rng, d);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::SeparableMargin: return "separable";
    case GeneratorKind::NoisyMargin: return "noisy";
    case GeneratorKind::GaussianClusters: return "clusters";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
  for (GeneratorKind k : {GeneratorKind::SeparableMargin, GeneratorKind::NoisyMargin, GeneratorKind::GaussianClusters}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown generator kind '" + name + "'");
}

void GeneratorSpec::validate() const {
  if (d == 0) throw std::invalid_argument("generator: d must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("generator: R must be positive");
  if (kind == GeneratorKind::GaussianClusters) {
    if (k < 2) throw std::invalid_argument("generator: clusters need k >= 2");
    if (!(spread >= 0.0)) throw std::invalid_argument("generator: spread must be non-negative");
    return;
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("generator: gamma must be positive");
  if (gamma >= 2.0 * R) throw std::invalid_argument("generator: infeasible margin, gamma >= 2R");
  if (!(max_offset >= 0.0) || 0.5 * gamma + max_offset >= R) {
    throw std::invalid_argument("generator: infeasible margin, gamma/2 + max_offset >= R");
  }
  if (!(balance > 0.0 && balance < 1.0)) throw std::invalid_argument("generator: balance must lie in (0, 1)");
  if (!(flip_prob >= 0.0 && flip_prob < 0.5)) throw std::invalid_argument("generator: flip_prob must lie in [0, 0.5)");
}

Generator::Generator(const GeneratorSpec& spec) : spec_(spec) {
  spec_.validate();
  std::mt19937_64 rng(derive_seed(spec_.seed, kWitnessSalt));
  if (spec_.kind == GeneratorKind::GaussianClusters) {
    // Centres inside half the radius so clusters are mostly unclipped.
    for (std::size_t c = 0; c < spec_.k; ++c) {
      Vector v;
      do {
        v = draw_ball(rng) * 0.5;
      } while (v.norm() > 0.5 * spec_.R);
      centers_.push_back(std::move(v));
    }
    witness_ = Vector::Zero(static_cast<Eigen::Index>(spec_.d));
    return;
  }
  witness_ = unit_vector(rng, spec_.d);
  if (spec_.max_offset > 0.0) {
    std::uniform_real_distribution<double> off(-spec_.max_offset, spec_.max_offset);
    offset_ = off(rng);
  }
}

Vector Generator::draw_ball(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    const Vector dir = unit_vector(rng, spec_.d);
    const double r = spec_.R * std::pow(unif(rng), 1.0 / static_cast<double>(spec_.d));
    Vector x = r * dir;
    if (x.norm() <= spec_.R) return x;
  }
}

Example Generator::draw_margin(std::mt19937_64& rng) const {
  std::bernoulli_distribution positive(spec_.balance);
  const int y = positive(rng) ? 1 : -1;
  const double half = 0.5 * spec_.gamma;
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Vector x = draw_ball(rng);
    const double p = witness_.dot(x);
    if ((y > 0 && p >= offset_ + half) || (y < 0 && p <= offset_ - half)) return {std::move(x), y};
  }
  throw std::runtime_error("generator: rejection sampling did not reach the margin region");
}

Dataset Generator::sample(std::size_t n, std::uint64_t stream_seed) const {
  Dataset out;
  out.reserve(n);
  std::mt19937_64 rng(derive_seed(stream_seed, kStreamSalt));
  if (spec_.kind == GeneratorKind::GaussianClusters) {
    std::uniform_int_distribution<std::size_t> cls(0, spec_.k - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = cls(rng);
      Vector x = centers_[c] + spec_.spread * gaussian_vector(rng, spec_.d);
      const double norm = x.norm();
      if (norm > spec_.R) x *= spec_.R / norm;
      // Rescaling can land an ulp outside the ball; pull it back inside.
      while (x.norm() > spec_.R) x *= 1.0 - 1e-15;
      out.push_back({std::move(x), static_cast<int>(c)});
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw_margin(rng));
  if (spec_.kind == GeneratorKind::NoisyMargin && spec_.flip_prob > 0.0) {
    // Flips come from their own stream so flip_prob = 0 reproduces the
    // separable output exactly.
    std::mt19937_64 flip_rng(derive_seed(stream_seed, kFlipSalt));
    std::bernoulli_distribution flip(spec_.flip_prob);
    for (Example& z : out) {
      if (flip(flip_rng)) z.y = -z.y;
    }
  }
  return out;
}

GeneratedData generate(const GeneratorSpec& spec, std::size_t n) {
  if (n < 2) throw std::invalid_argument("generate: n must be at least 2");
  Generator gen(spec);
  GeneratedData out;
  out.data = gen.sample(n, spec.seed);
  out.witness = gen.witness();
  out.offset = gen.offset();
  out.centers = gen.centers();
  return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_csv: cannot open " + path.string());
  const Eigen::Index d = data.empty() ? 0 : data.front().x.size();
  os << "label";
  for (Eigen::Index j = 1; j <= d; ++j) os << ",f" << j;
  os << '\n';
  char buf[40];
  for (const Example& z : data) {
    if (z.x.size() != d) throw DimensionError("save_csv: inconsistent feature dimension");
    os << z.y;
    for (Eigen::Index j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", z.x[j]);
      os << ',' << buf;
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("save_csv: write failed for " + path.string());
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("label", 0) != 0) throw FormatError(path.string() + ":1: missing 'label,...' header");
  std::size_t d = 0;
  for (char ch : line) d += ch == ',' ? 1 : 0;

  Dataset out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fail = [&](const std::string& why) {
      return FormatError(path.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto pos = rest.find(',');
      fields.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (fields.size() != d + 1) {
      throw fail("expected " + std::to_string(d + 1) + " fields, got " + std::to_string(fields.size()));
    }
    Example z;
    {
      const auto f = fields[0];
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), z.y);
      if (ec != std::errc() || p != f.data() + f.size()) throw fail("bad label '" + std::string(f) + "'");
    }
    z.x.resize(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      const auto f = fields[j + 1];
      double v = 0.0;
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size()) throw fail("bad feature '" + std::string(f) + "'");
      z.x[static_cast<Eigen::Index>(j)] = v;
    }
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace polt
