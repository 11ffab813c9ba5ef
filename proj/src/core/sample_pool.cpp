#include "core/sample_pool.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "core/errors.hpp"

namespace mcr {

uint64_t fnv1a(const void* data, size_t bytes, uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

SamplePool::SamplePool(std::vector<double> data, size_t n, size_t d)
    : n_(n), d_(d), data_(std::move(data)) {
  if (n_ == 0 || d_ == 0) throw std::invalid_argument("sample pool: need n >= 1 and d >= 1");
  if (data_.size() != n_ * d_)
    throw std::invalid_argument("sample pool: data size does not match n*d");
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < d_; ++j)
      if (!std::isfinite(data_[i * d_ + j]))
        throw std::invalid_argument("sample pool: non-finite value at row " +
                                    std::to_string(i) + ", column " + std::to_string(j));

  sorted_.resize(d_);
  sorted_index_.resize(d_);
  std::vector<uint32_t> idx(n_);
  for (size_t j = 0; j < d_; ++j) {
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
      return data_[a * d_ + j] < data_[b * d_ + j];
    });
    sorted_index_[j] = idx;
    sorted_[j].resize(n_);
    for (size_t i = 0; i < n_; ++i) sorted_[j][i] = data_[idx[i] * d_ + j];
  }

  uint64_t h = fnv1a(&n_, sizeof(n_));
  h = fnv1a(&d_, sizeof(d_), h);
  fingerprint_ = fnv1a(data_.data(), data_.size() * sizeof(double), h);
}

SamplePool SamplePool::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("sample pool: need at least one row");
  const size_t d = rows[0].size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d)
      throw std::invalid_argument("sample pool: row " + std::to_string(i) +
                                  " has " + std::to_string(rows[i].size()) +
                                  " columns, expected " + std::to_string(d));
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return SamplePool(std::move(flat), rows.size(), d);
}

double SamplePool::column_stddev(size_t j) const {
  long double mean = 0.0L;
  for (size_t i = 0; i < n_; ++i) mean += data_[i * d_ + j];
  mean /= static_cast<long double>(n_);
  long double ss = 0.0L;
  for (size_t i = 0; i < n_; ++i) {
    const long double dv = data_[i * d_ + j] - mean;
    ss += dv * dv;
  }
  return std::sqrt(static_cast<double>(ss / static_cast<long double>(n_)));
}

std::string SamplePool::fingerprint_hex() const { return to_hex(fingerprint_); }

SelectionState::SelectionState(const SamplePool& pool)
    : pool_(&pool), flag_(pool.size(), 0), picked_sorted_(pool.dims()) {
  remaining_.resize(pool.size());
  std::iota(remaining_.begin(), remaining_.end(), 0u);
  picked_.reserve(pool.size());
}

void SelectionState::pick(uint32_t i) {
  if (i >= pool_->size()) throw std::invalid_argument("pick: index out of range");
  if (flag_[i]) throw std::invalid_argument("pick: sample " + std::to_string(i) + " already picked");
  flag_[i] = 1;
  picked_.push_back(i);
  const auto it = std::lower_bound(remaining_.begin(), remaining_.end(), i);
  remaining_.erase(it);
  for (size_t j = 0; j < pool_->dims(); ++j) {
    auto& col = picked_sorted_[j];
    const double v = pool_->at(i, j);
    col.insert(std::upper_bound(col.begin(), col.end(), v), v);
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SamplePool read_pool_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pool CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty pool CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line, ',');
  const size_t d = header.size();
  for (size_t j = 0; j < d; ++j) {
    if (header[j] != "x" + std::to_string(j))
      throw IoError(path + ": expected header column x" + std::to_string(j) +
                    ", found '" + header[j] + "'");
  }
  std::vector<double> data;
  size_t n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line, ',');
    if (cells.size() != d)
      throw IoError(path + ": row " + std::to_string(n) + " has " +
                    std::to_string(cells.size()) + " columns, expected " + std::to_string(d));
    for (size_t j = 0; j < d; ++j) {
      double v = 0.0;
      const auto& cell = cells[j];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw IoError(path + ": bad number '" + cell + "' at row " + std::to_string(n) +
                      ", column " + std::to_string(j));
      data.push_back(v);
    }
    ++n;
  }
  if (n == 0) throw IoError(path + ": no sample rows");
  try {
    return SamplePool(std::move(data), n, d);
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_pool_csv(const SamplePool& pool, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write pool CSV: " + path);
  for (size_t j = 0; j < pool.dims(); ++j) {
    if (j) out << ',';
    out << 'x' << j;
  }
  out << '\n';
  for (size_t i = 0; i < pool.size(); ++i) {
    for (size_t j = 0; j < pool.dims(); ++j) {
      if (j) out << ',';
      out << format_double(pool.at(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mcr
