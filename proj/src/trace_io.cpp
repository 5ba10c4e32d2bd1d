#include "polt/trace_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace polt {

namespace {

constexpr char kMagic[5] = {'P', 'O', 'L', 'T', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == in_.size(); }
  // Guards a count read from the file against the bytes actually left.
  void expect(std::uint64_t count, std::uint64_t unit) {
    if (unit != 0 && count > (in_.size() - pos_) / unit) throw TraceFormatError("trace: truncated file");
  }

 private:
  void need(std::size_t k) {
    if (in_.size() - pos_ < k) throw TraceFormatError("trace: truncated file");
  }
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_trace(const TraceFile& file) {
  const LearnerConfig& cfg = file.config;
  const RunTrace& trace = file.trace;
  const std::uint64_t n = file.stream.size();
  if (trace.n() != n) throw std::invalid_argument("encode_trace: trace and stream lengths differ");
  const Eigen::Index d = file.stream.empty() ? 0 : file.stream.front().x.size();

  Writer w;
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u32(kTraceVersion);
  w.u8(static_cast<std::uint8_t>(cfg.kind));
  w.f64(cfg.R);
  w.f64(cfg.U);
  w.u64(cfg.T);
  w.u8(cfg.capacity ? 1 : 0);
  w.u64(cfg.capacity.value_or(0));
  w.u8(static_cast<std::uint8_t>(cfg.finite_strategy));
  w.u64(cfg.seed);
  w.u8(static_cast<std::uint8_t>((cfg.literal_update_sign ? 1 : 0) | (cfg.literal_buffer_normalizer ? 2 : 0)));
  w.u64(cfg.snapshot_stride);
  w.f64(cfg.c);

  w.u64(n);
  w.u64(static_cast<std::uint64_t>(d));
  for (const Example& z : file.stream) {
    if (z.x.size() != d) throw DimensionError("encode_trace: inconsistent feature dimension");
    w.i32(z.y);
    for (Eigen::Index j = 0; j < d; ++j) w.f64(z.x[j]);
  }
  for (const RoundRecord& r : trace.rounds()) {
    w.u8(static_cast<std::uint8_t>((r.statistic ? 1 : 0) | (r.mistake ? 2 : 0)));
    w.f64(r.statistic.value_or(0.0));
    w.f64(r.loss);
    w.u64(r.history_size);
  }
  w.u64(trace.radius_violations);
  w.u64(trace.stored_hypotheses());
  for (std::size_t i = 0; i <= n; ++i) {
    if (!trace.has_hypothesis(i)) continue;
    w.u64(i);
    const Hypothesis& h = trace.hypothesis(i);
    if (const auto* lin = std::get_if<LinearScorer>(&h)) {
      if (lin->dim() != d) throw DimensionError("encode_trace: hypothesis dimension differs from the stream");
      w.u8(0);
      for (Eigen::Index j = 0; j < d; ++j) w.f64(lin->w[j]);
    } else {
      const Matrix& a = std::get<MetricMatrix>(h).a;
      if (a.rows() != d || a.cols() != d) throw DimensionError("encode_trace: hypothesis dimension differs");
      w.u8(1);
      for (Eigen::Index j = 0; j < d * d; ++j) w.f64(a(j % d, j / d));
    }
  }
  return w.take();
}

TraceFile decode_trace(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  for (char ch : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(ch)) throw TraceFormatError("trace: bad magic, not a POLT1 file");
  }
  const std::uint32_t version = r.u32();
  if (version != kTraceVersion) {
    throw TraceFormatError("trace: unsupported version " + std::to_string(version));
  }
  TraceFile out;
  LearnerConfig& cfg = out.config;
  const std::uint8_t kind = r.u8();
  if (kind > static_cast<std::uint8_t>(LearnerKind::MetricOgd)) throw TraceFormatError("trace: bad learner kind");
  cfg.kind = static_cast<LearnerKind>(kind);
  cfg.R = r.f64();
  cfg.U = r.f64();
  cfg.T = r.u64();
  const bool has_cap = r.u8() != 0;
  const std::uint64_t cap = r.u64();
  if (has_cap) cfg.capacity = cap;
  const std::uint8_t strategy = r.u8();
  if (strategy > static_cast<std::uint8_t>(BufferStrategy::Reservoir)) throw TraceFormatError("trace: bad strategy");
  cfg.finite_strategy = static_cast<BufferStrategy>(strategy);
  cfg.seed = r.u64();
  const std::uint8_t flags = r.u8();
  cfg.literal_update_sign = (flags & 1) != 0;
  cfg.literal_buffer_normalizer = (flags & 2) != 0;
  cfg.snapshot_stride = r.u64();
  cfg.c = r.f64();

  const std::uint64_t n = r.u64();
  const std::uint64_t d = r.u64();
  if (d > (1u << 20)) throw TraceFormatError("trace: implausible dimension");
  r.expect(n, 4 + 8 * d);
  out.stream.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Example z;
    z.y = r.i32();
    z.x.resize(static_cast<Eigen::Index>(d));
    for (std::uint64_t j = 0; j < d; ++j) z.x[static_cast<Eigen::Index>(j)] = r.f64();
    out.stream.push_back(std::move(z));
  }
  out.trace = RunTrace(n, cfg.c, cfg.capacity);
  r.expect(n, 25);
  for (std::uint64_t t = 1; t <= n; ++t) {
    RoundRecord& rec = out.trace.round(t);
    const std::uint8_t f = r.u8();
    const double stat = r.f64();
    if (f & 1) rec.statistic = stat;
    rec.mistake = (f & 2) != 0;
    rec.loss = r.f64();
    rec.history_size = r.u64();
  }
  out.trace.radius_violations = r.u64();
  const std::uint64_t count = r.u64();
  r.expect(count, 9);
  const Eigen::Index di = static_cast<Eigen::Index>(d);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t index = r.u64();
    if (index > n) throw TraceFormatError("trace: snapshot index out of range");
    const std::uint8_t hk = r.u8();
    if (hk == 0) {
      Vector w(di);
      for (Eigen::Index j = 0; j < di; ++j) w[j] = r.f64();
      out.trace.set_hypothesis(index, LinearScorer(std::move(w)));
    } else if (hk == 1) {
      Matrix a(di, di);
      for (Eigen::Index j = 0; j < di * di; ++j) a(j % di, j / di) = r.f64();
      out.trace.set_hypothesis(index, MetricMatrix(std::move(a)));
    } else {
      throw TraceFormatError("trace: bad hypothesis kind");
    }
  }
  if (!r.done()) throw TraceFormatError("trace: trailing bytes");
  return out;
}

void write_trace(const TraceFile& file, const std::filesystem::path& path) {
  const auto bytes = encode_trace(file);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_trace: cannot open " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write_trace: write failed for " + path.string());
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_trace: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

}  // namespace polt
