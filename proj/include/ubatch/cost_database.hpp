// Copyright 2026 The ubatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "ubatch/domain.hpp"

namespace ubatch {

inline constexpr std::string_view kCostCsvHeader =
    "kernel_hash,op_type,algorithm,micro_batch,time_us,workspace_bytes,feasible";

// Keyed store of cost records with an optional CSV backing file. Lookups take
// a shared lock, inserts an exclusive one, so concurrent cost queries from
// parallel optimizations are safe. flush() writes the whole map sorted by
// key through a temp file followed by a rename, so readers never observe a
// half-written database.
//
// File format (UTF-8, one record per line after the fixed header):
//   kernel_hash,op_type,algorithm,micro_batch,time_us,workspace_bytes,feasible
// kernel_hash is 16 hex digits, op_type one of Forward/BackwardData/
// BackwardFilter, time_us an exact decimal or "num/den" rational, feasible
// 0 or 1. Infeasible records carry time 0 and workspace 0.
class CostDatabase {
 public:
  CostDatabase() = default;

  CostDatabase(CostDatabase&& other) noexcept
      : records_(std::move(other.records_)),
        backing_(std::move(other.backing_)) {}
  CostDatabase& operator=(CostDatabase&& other) noexcept {
    records_ = std::move(other.records_);
    backing_ = std::move(other.backing_);
    return *this;
  }

  // Parses an existing database file.
  static CostDatabase load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot open cost database: " + path.string());
    }
    CostDatabase db = parse_csv(in, path.filename().string());
    db.backing_ = path;
    return db;
  }

  // Loads `path` if it exists, otherwise starts empty; either way the
  // database is attached to `path` for flush().
  static CostDatabase open(const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) return load(path);
    CostDatabase db;
    db.backing_ = path;
    return db;
  }

  static CostDatabase parse_csv(std::istream& in, std::string_view source_name);

  std::optional<CostRecord> get(const CostKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  // Inserts or overwrites the record under its own key.
  void put(const CostRecord& record) {
    std::unique_lock lock(mutex_);
    records_[record.key] = record;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
  }

  // Snapshot in key order.
  std::vector<CostRecord> records() const {
    std::shared_lock lock(mutex_);
    std::vector<CostRecord> out;
    out.reserve(records_.size());
    for (const auto& [key, record] : records_) out.push_back(record);
    return out;
  }

  const std::optional<std::filesystem::path>& backing_path() const {
    return backing_;
  }

  void flush() const {
    if (!backing_) {
      throw std::runtime_error("cost database has no backing file");
    }
    flush_to(*backing_);
  }

  void flush_to(const std::filesystem::path& path) const {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) {
        throw std::runtime_error("cannot write cost database: " + tmp.string());
      }
      std::shared_lock lock(mutex_);
      out << kCostCsvHeader << '\n';
      for (const auto& [key, record] : records_) {
        out << format_record(record) << '\n';
      }
      if (!out.good()) {
        throw std::runtime_error("write failed: " + tmp.string());
      }
    }
    std::filesystem::rename(tmp, path);
  }

  static std::string format_record(const CostRecord& r) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << r.key.kernel_hash;
    os << std::dec << ',' << to_string(r.key.op_type) << ','
       << r.key.algorithm.value << ',' << r.key.micro_batch << ','
       << r.time.to_string() << ',' << r.workspace << ','
       << (r.feasible ? '1' : '0');
    return os.str();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<CostKey, CostRecord> records_;
  std::optional<std::filesystem::path> backing_;
};

inline CostDatabase CostDatabase::parse_csv(std::istream& in,
                                            std::string_view source_name) {
  CostDatabase db;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& message) {
    std::ostringstream os;
    os << source_name << ":" << line_no << ": " << message;
    throw parse_error(os.str(), line_no);
  };

  if (!std::getline(in, line)) {
    line_no = 1;
    fail("empty cost database");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCostCsvHeader) fail("unexpected header");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) fail("expected 7 comma-separated fields");
    CostRecord record;
    try {
      record.key.kernel_hash = std::stoull(fields[0], nullptr, 16);
      auto op = parse_op_type(fields[1]);
      if (!op) fail("unknown op_type '" + fields[1] + "'");
      record.key.op_type = *op;
      record.key.algorithm.value = static_cast<std::int32_t>(std::stol(fields[2]));
      record.key.micro_batch = std::stoll(fields[3]);
      record.time = Rat64::parse(fields[4]);
      record.workspace = std::stoll(fields[5]);
      if (fields[6] == "1") {
        record.feasible = true;
      } else if (fields[6] == "0") {
        record.feasible = false;
      } else {
        fail("feasible must be 0 or 1");
      }
    } catch (const parse_error&) {
      throw;
    } catch (const std::exception& e) {
      fail(std::string("malformed record: ") + e.what());
    }
    if (record.key.micro_batch < 1) fail("micro_batch must be >= 1");
    if (record.time.is_negative() || record.workspace < 0) {
      fail("costs must be >= 0");
    }
    if (!record.feasible) {
      record = CostRecord::infeasible_record(record.key);
    }
    db.records_[record.key] = record;
  }
  return db;
}

}  // namespace ubatch
