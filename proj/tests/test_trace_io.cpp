#include "polt/datagen.hpp"
#include "polt/learners.hpp"
#include "polt/trace_io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace polt;
namespace fs = std::filesystem;

namespace {

TraceFile make(LearnerKind kind, std::size_t stride) {
  GeneratorSpec spec;
  spec.kind = kind == LearnerKind::MetricOgd ? GeneratorKind::GaussianClusters : GeneratorKind::NoisyMargin;
  spec.flip_prob = kind == LearnerKind::MetricOgd ? 0.0 : 0.1;
  spec.d = 3;
  spec.seed = 5;
  TraceFile f;
  f.config.kind = kind;
  if (f.config.is_finite()) {
    f.config.capacity = 16;
    f.config.finite_strategy = BufferStrategy::Reservoir;
  }
  if (kind == LearnerKind::MetricOgd) f.config.R = 2.0;
  f.config.seed = 99;
  f.config.snapshot_stride = stride;
  f.config.literal_update_sign = kind == LearnerKind::OgdRankFinite;
  f.stream = generate(spec, 120).data;
  f.trace = run_online(f.config, f.stream);
  return f;
}

void check_same(const TraceFile& a, const TraceFile& b) {
  CHECK(a.config.kind == b.config.kind);
  CHECK(a.config.R == b.config.R);
  CHECK(a.config.U == b.config.U);
  CHECK(a.config.T == b.config.T);
  CHECK(a.config.capacity == b.config.capacity);
  CHECK(a.config.finite_strategy == b.config.finite_strategy);
  CHECK(a.config.seed == b.config.seed);
  CHECK(a.config.literal_update_sign == b.config.literal_update_sign);
  CHECK(a.config.literal_buffer_normalizer == b.config.literal_buffer_normalizer);
  CHECK(a.config.snapshot_stride == b.config.snapshot_stride);
  CHECK(a.config.c == b.config.c);
  REQUIRE(a.stream.size() == b.stream.size());
  for (std::size_t i = 0; i < a.stream.size(); ++i) {
    CHECK(a.stream[i].y == b.stream[i].y);
    CHECK(a.stream[i].x == b.stream[i].x);
  }
  REQUIRE(a.trace.n() == b.trace.n());
  CHECK(a.trace.radius_violations == b.trace.radius_violations);
  CHECK(a.trace.stored_hypotheses() == b.trace.stored_hypotheses());
  for (std::size_t t = 1; t <= a.trace.n(); ++t) {
    CHECK(a.trace.round(t).statistic == b.trace.round(t).statistic);
    CHECK(a.trace.round(t).loss == b.trace.round(t).loss);
    CHECK(a.trace.round(t).mistake == b.trace.round(t).mistake);
    CHECK(a.trace.round(t).history_size == b.trace.round(t).history_size);
  }
  for (std::size_t i = 0; i <= a.trace.n(); ++i) {
    REQUIRE(a.trace.has_hypothesis(i) == b.trace.has_hypothesis(i));
    if (!a.trace.has_hypothesis(i)) continue;
    const Hypothesis& ha = a.trace.hypothesis(i);
    const Hypothesis& hb = b.trace.hypothesis(i);
    REQUIRE(ha.index() == hb.index());
    if (const auto* l = std::get_if<LinearScorer>(&ha)) {
      CHECK(l->w == std::get<LinearScorer>(hb).w);
    } else {
      CHECK(std::get<MetricMatrix>(ha).a == std::get<MetricMatrix>(hb).a);
    }
  }
}

}  // namespace

TEST_CASE("round trip for every learner") {
  const fs::path dir(POLT_TEST_TMP);
  fs::create_directories(dir);
  for (LearnerKind k : {LearnerKind::OamInfinite, LearnerKind::OamFinite, LearnerKind::OgdRankInfinite,
                        LearnerKind::OgdRankFinite, LearnerKind::Perceptron, LearnerKind::MetricOgd}) {
    for (std::size_t stride : {1u, 25u}) {
      const TraceFile f = make(k, stride);
      const fs::path p = dir / ("t_" + to_string(k) + ".polt");
      write_trace(f, p);
      const TraceFile g = read_trace(p);
      check_same(f, g);
      CHECK(encode_trace(g) == encode_trace(f));
    }
  }
}

TEST_CASE("corrupt files are rejected") {
  const auto bytes = encode_trace(make(LearnerKind::OamInfinite, 10));
  CHECK_NOTHROW(decode_trace(bytes));
  CHECK_THROWS_AS(decode_trace({}), TraceFormatError);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_trace(bad_magic), TraceFormatError);

  auto bad_version = bytes;
  bad_version[5] = 2;
  CHECK_THROWS_AS(decode_trace(bad_version), TraceFormatError);

  for (std::size_t cut : {std::size_t{3}, std::size_t{9}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    CHECK_THROWS_AS(decode_trace(truncated), TraceFormatError);
  }
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_trace(trailing), TraceFormatError);

  auto bad_kind = bytes;
  bad_kind[9] = 200;
  CHECK_THROWS_AS(decode_trace(bad_kind), TraceFormatError);

  CHECK_THROWS(read_trace(fs::path(POLT_TEST_TMP) / "does_not_exist.polt"));
}

TEST_CASE("mismatched stream is refused on write") {
  TraceFile f = make(LearnerKind::OamInfinite, 1);
  f.stream.pop_back();
  CHECK_THROWS(encode_trace(f));
}
