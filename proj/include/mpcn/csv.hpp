#pragma once

// Deterministic CSV emission. Doubles are rendered with std::to_chars
// (shortest round-trip form), so identical values always produce identical
// bytes and files parse back exactly.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpcn {

inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string to_cell(double v) { return format_double(v); }
inline std::string to_cell(long v) { return std::to_string(v); }
inline std::string to_cell(int v) { return std::to_string(v); }
inline std::string to_cell(std::uint64_t v) { return std::to_string(v); }
inline std::string to_cell(const std::string& v) { return v; }
inline std::string to_cell(const char* v) { return v; }

class CsvBuilder {
 public:
  void comment(const std::string& line) {
    out_ += "# ";
    out_ += line;
    out_ += '\n';
  }
  void header(std::span<const std::string> columns) { raw_line(join(columns)); }
  template <typename... Ts>
  void row(const Ts&... cells) {
    std::string line;
    append(line, to_cell(cells)...);
    raw_line(line);
  }
  void raw_line(const std::string& line) {
    out_ += line;
    out_ += '\n';
  }
  const std::string& str() const { return out_; }
  void write(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path().empty()
                                            ? "."
                                            : path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << out_;
  }

 private:
  static std::string join(std::span<const std::string> cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line;
  }
  template <typename T, typename... Rest>
  static void append(std::string& line, const T& first, const Rest&... rest) {
    line += first;
    ((line += ',', line += rest), ...);
  }
  std::string out_;
};

// Strip comment lines; used to compare CSV bodies for byte-identity.
inline std::string csv_body(const std::string& content) {
  std::string body;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    if (content[pos] != '#') body.append(content, pos, end - pos + 1);
    pos = end + 1;
  }
  return body;
}

}  // namespace mpcn
