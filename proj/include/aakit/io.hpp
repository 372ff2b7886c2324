#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace aakit {

// CSV: one observation per line, comma-separated reals, optional header line.
// Lines starting with '#' are comments. In memory each observation becomes a
// column.

struct CsvOptions {
  bool header = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Parses CSV text into a d x N matrix (N observations of d features).
/// Blank and comment lines are skipped. Every field must be a finite decimal real.
inline DenseMatrix parse_csv(std::string_view text, CsvOptions options = {}) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t observations = 0;
  std::size_t line_no = 0;
  bool header_pending = options.header;

  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    const std::string_view content = detail::trim(line);
    if (content.empty() || content.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view raw =
          detail::trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      ++field;
      double v = 0.0;
      const char* first = raw.data();
      const char* last = raw.data() + raw.size();
      if (!raw.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (raw.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ", field " + std::to_string(field) +
                             ": not a finite number: '" + std::string(raw) + "'",
                         line_no, field);
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (observations == 0) {
      width = field;
    } else if (field != width) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                           " fields, found " + std::to_string(field),
                       line_no, std::min(field, width) + 1);
    }
    ++observations;
  }
  if (observations == 0) throw ParseError("no data rows");
  // Row-major observations are exactly the column-major d x N layout.
  return DenseMatrix(width, observations, std::move(values));
}

inline DenseMatrix read_csv(const std::string& path, CsvOptions options = {}) {
  return parse_csv(detail::read_file(path), options);
}

/// One line per column of x, "%.17g" so that parsing recovers every bit.
inline std::string format_csv(const DenseMatrix& x, const std::vector<std::string>& header = {},
                              const std::string& comment = {}) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out += ',';
      out += header[i];
    }
    out += '\n';
  }
  char buf[32];
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!out) throw ParseError("write failed for " + path);
}

inline void write_csv(const std::string& path, const DenseMatrix& x) { write_text(path, format_csv(x)); }

// Binary cache: "AAKIT1", u64 rows, u64 cols, rows*cols little-endian
// doubles in column-major order.

inline constexpr std::string_view kBinaryMagic = "AAKIT1";

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out += static_cast<char>((v >> (8 * b)) & 0xff);
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace detail

inline std::string encode_binary(const DenseMatrix& x) {
  std::string out(kBinaryMagic);
  detail::put_u64(out, x.rows());
  detail::put_u64(out, x.cols());
  for (double v : x.data()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    detail::put_u64(out, bits);
  }
  return out;
}

inline DenseMatrix decode_binary(std::string_view bytes) {
  constexpr std::size_t kHeader = 6 + 16;
  if (bytes.size() < kHeader || bytes.substr(0, 6) != kBinaryMagic)
    throw ParseError("binary matrix: missing AAKIT1 header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t rows = detail::get_u64(p + 6);
  const std::uint64_t cols = detail::get_u64(p + 14);
  if (rows != 0 && cols > (bytes.size() - kHeader) / 8 / rows)
    throw ParseError("binary matrix: truncated payload");
  if ((bytes.size() - kHeader) != rows * cols * 8) throw ParseError("binary matrix: payload length mismatch");
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint64_t bits = detail::get_u64(p + kHeader + 8 * i);
    std::memcpy(&data[i], &bits, sizeof bits);
    if (!std::isfinite(data[i])) throw ParseError("binary matrix: non-finite entry", 0, 0);
  }
  return DenseMatrix(rows, cols, std::move(data));
}

inline void write_binary(const std::string& path, const DenseMatrix& x) { write_text(path, encode_binary(x)); }

inline DenseMatrix read_binary(const std::string& path) { return decode_binary(detail::read_file(path)); }

/// Reads either format, recognising the binary cache by its magic bytes.
inline DenseMatrix read_matrix(const std::string& path, CsvOptions options = {}) {
  const std::string bytes = detail::read_file(path);
  if (std::string_view(bytes).substr(0, kBinaryMagic.size()) == kBinaryMagic) return decode_binary(bytes);
  return parse_csv(bytes, options);
}

/// 64-bit FNV-1a over the binary encoding: identical matrices hash alike
/// whichever file format they were read from.
inline std::uint64_t content_digest(const DenseMatrix& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : encode_binary(x)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace aakit
