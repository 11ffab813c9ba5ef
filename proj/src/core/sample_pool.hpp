#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mcr {

/// Immutable pool of n samples in d dimensions. Each dimension is sorted once
/// at construction; every later distance evaluation consumes the sorted views.
/// Safe to share across threads after construction.
class SamplePool {
public:
  // row-major data of size n*d; throws std::invalid_argument on n==0, d==0 or
  // any non-finite value (message names the offending row and column).
  SamplePool(std::vector<double> data, size_t n, size_t d);

  static SamplePool from_rows(const std::vector<std::vector<double>>& rows);

  size_t size() const { return n_; }
  size_t dims() const { return d_; }
  double at(size_t i, size_t j) const { return data_[i * d_ + j]; }
  std::span<const double> row(size_t i) const { return {data_.data() + i * d_, d_}; }
  const std::vector<double>& raw() const { return data_; }

  // Ascending column values; ties keep original index order.
  std::span<const double> sorted(size_t j) const { return sorted_[j]; }
  // Original row of each sorted slot.
  std::span<const uint32_t> sorted_index(size_t j) const { return sorted_index_[j]; }

  double column_stddev(size_t j) const;

  // FNV-1a over (n, d, raw value bits); identifies the pool in downstream files.
  uint64_t fingerprint() const { return fingerprint_; }
  std::string fingerprint_hex() const;

private:
  size_t n_ = 0, d_ = 0;
  std::vector<double> data_;
  std::vector<std::vector<double>> sorted_;
  std::vector<std::vector<uint32_t>> sorted_index_;
  uint64_t fingerprint_ = 0;
};

/// Pick-order bookkeeping: the ordered picked set P, the remaining set R, and
/// per-dimension ascending views of the picked values. Single writer; readers
/// may run concurrently between mutations.
class SelectionState {
public:
  explicit SelectionState(const SamplePool& pool);

  const SamplePool& pool() const { return *pool_; }
  size_t picked_count() const { return picked_.size(); }
  std::span<const uint32_t> picked() const { return picked_; }      // pick order
  std::span<const uint32_t> remaining() const { return remaining_; }  // ascending
  bool is_picked(uint32_t i) const { return flag_[i] != 0; }
  std::span<const double> picked_sorted(size_t j) const { return picked_sorted_[j]; }

  // Moves i from R to P; throws std::invalid_argument if already picked.
  void pick(uint32_t i);

private:
  const SamplePool* pool_;
  std::vector<uint32_t> picked_;
  std::vector<uint32_t> remaining_;
  std::vector<uint8_t> flag_;
  std::vector<std::vector<double>> picked_sorted_;
};

// CSV exchange format: header `x0,...,x{d-1}`, LF line endings, values written
// with shortest round-trip precision so a write/read cycle is bit-exact.
SamplePool read_pool_csv(const std::string& path);
void write_pool_csv(const SamplePool& pool, const std::string& path);

uint64_t fnv1a(const void* data, size_t bytes, uint64_t h = 0xcbf29ce484222325ULL);
std::string to_hex(uint64_t v);
std::string format_double(double v);  // shortest round-trip

}  // namespace mcr
