#pragma once

// Deterministic CSV / JSON / raw-binary output helpers.  All numeric
// formatting goes through one routine so a fixed config + seed produces
// byte-identical files.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mflab {

using json = nlohmann::json;

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != header_.size())
      throw std::invalid_argument("CsvTable: row width mismatch");
    rows_.push_back(row);
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  // stable sort by the leading columns so aggregation order never shows
  void sort_rows() {
    std::stable_sort(rows_.begin(), rows_.end());
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t c = 0; c < header_.size(); ++c) {
      if (c) out += ',';
      out += header_[c];
    }
    out += '\n';
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) out += ',';
        out += fmt_num(r[c]);
      }
      out += '\n';
    }
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << to_string();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << text;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return json::parse(f);
}

// flat little-endian float64 dump with a JSON sidecar describing the shape
inline void write_f64_dump(const std::filesystem::path& stem,
                           const std::vector<double>& data,
                           const std::vector<long>& shape) {
  std::ofstream f(stem.string() + ".f64", std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + stem.string() + ".f64");
  f.write(reinterpret_cast<const char*>(data.data()),
          std::streamsize(data.size() * sizeof(double)));
  json side;
  side["dtype"] = "float64";
  side["byte_order"] = "little";
  side["shape"] = shape;
  write_text(stem.string() + ".json", side.dump(2) + "\n");
}

}  // namespace mflab
