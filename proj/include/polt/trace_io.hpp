#ifndef POLT_TRACE_IO_HPP_
#define POLT_TRACE_IO_HPP_

#include "polt/core.hpp"
#include "polt/learners.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace polt {

// Trace container, all integers and doubles little-endian:
//
//   "POLT1"            5 bytes magic
//   u32 version        currently 1
//   learner config     u8 kind, f64 R, f64 U, u64 T, u8 has_capacity,
//                      u64 capacity, u8 strategy, u64 seed, u8 flags
//                      (bit 0 literal sign, bit 1 literal normalizer),
//                      u64 snapshot_stride, f64 c
//   u64 n, u64 d
//   stream             n x (i32 label, d x f64)
//   rounds             n x (u8 flags (bit 0 has statistic, bit 1 mistake),
//                      f64 statistic, f64 loss, u64 history_size)
//   u64 radius_violations
//   u64 snapshot count, then per snapshot
//                      u64 index, u8 kind (0 linear, 1 matrix),
//                      d or d*d f64 (matrix column-major)
inline constexpr std::uint32_t kTraceVersion = 1;

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceFile {
  LearnerConfig config;
  Dataset stream;
  RunTrace trace;
};

std::vector<std::uint8_t> encode_trace(const TraceFile& file);
TraceFile decode_trace(const std::vector<std::uint8_t>& bytes);

void write_trace(const TraceFile& file, const std::filesystem::path& path);
TraceFile read_trace(const std::filesystem::path& path);

}  // namespace polt

#endif  // POLT_TRACE_IO_HPP_
