#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsaw {

/// Shortest decimal form that round-trips a double; keeps CSV bodies
/// byte-identical across runs with the same seed.
inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_value(int v) { return std::to_string(v); }
inline std::string format_value(long v) { return std::to_string(v); }
inline std::string format_value(long long v) { return std::to_string(v); }
inline std::string format_value(unsigned long long v) { return std::to_string(v); }
inline std::string format_value(const std::string& v) { return v; }
inline std::string format_value(const char* v) { return v; }

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
  }

  template <class... Ts>
  void row(const Ts&... vals) {
    std::string line;
    bool first = true;
    ((line += (first ? "" : ","), line += format_value(vals), first = false), ...);
    line += "\n";
    out_ << line;
  }

  void raw_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ",";
      line += cells[i];
    }
    line += "\n";
    out_ << line;
  }

 private:
  std::ofstream out_;
};

}  // namespace wsaw
