#ifndef AMPNNSPL_IO_HPP
#define AMPNNSPL_IO_HPP

#include "ampnnspl/common.hpp"
#include "ampnnspl/topology.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace ampnnspl::io {

inline constexpr char kBinaryMagic[5] = {'A', 'M', 'P', 'V', '1'};

/// Shortest decimal representation that round-trips the double exactly, so
/// emitted CSV files are diffable and reparseable without loss.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_double(std::string_view token, const std::string& path,
                           std::size_t line_no) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r'))
    --end;
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || begin == end) {
    throw io_error(path + ":" + std::to_string(line_no) + ": cannot parse number '" +
                   std::string(token) + "'");
  }
  return value;
}

inline std::uint64_t read_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

inline void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline Matrix read_matrix_binary(std::ifstream& in, const std::string& path) {
  char magic[5];
  in.read(magic, 5);
  const std::uint64_t rows = read_u64_le(in);
  const std::uint64_t cols = read_u64_le(in);
  if (!in || rows == 0 || cols == 0 || rows * cols > (1ULL << 30)) {
    throw io_error(path + ": bad binary header");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  static_assert(sizeof(double) == 8);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(rows * cols * 8));
  if (!in) throw io_error(path + ": truncated binary payload");
  return m;
}

inline Matrix read_matrix_text(std::ifstream& in, const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const std::string_view token = comma == std::string_view::npos
                                         ? view.substr(start)
                                         : view.substr(start, comma - start);
      row.push_back(parse_double(token, path, line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw io_error(path + ":" + std::to_string(line_no) + ": expected " +
                     std::to_string(cols) + " columns, found " +
                     std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path + ": empty matrix file");
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace detail

/// Reads a matrix, sniffing the AMPV1 binary magic and falling back to CSV
/// (one row per line, comma-separated).
inline Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open for reading");
  char magic[5] = {};
  in.read(magic, 5);
  const bool binary = in.gcount() == 5 && std::memcmp(magic, kBinaryMagic, 5) == 0;
  in.clear();
  in.seekg(0);
  return binary ? detail::read_matrix_binary(in, path)
                : detail::read_matrix_text(in, path);
}

/// A vector file is a single-column (or single-row) matrix file.
inline Vector read_vector(const std::string& path) {
  const Matrix m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw io_error(path + ": expected a vector, found " + std::to_string(m.rows()) +
                 "x" + std::to_string(m.cols()) + " matrix");
}

/// Writes CSV, or the AMPV1 binary layout (magic, u64 LE dims, row-major
/// f64 LE payload) when the path ends in ".bin".
inline void write_matrix(const std::string& path, const Matrix& m) {
  const bool binary = path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  if (binary) {
    out.write(kBinaryMagic, 5);
    detail::write_u64_le(out, static_cast<std::uint64_t>(m.rows()));
    detail::write_u64_le(out, static_cast<std::uint64_t>(m.cols()));
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * 8));
  } else {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c > 0) out << ',';
        out << format_double(m(r, c));
      }
      out << '\n';
    }
  }
  if (!out) throw io_error(path + ": write failed");
}

inline void write_vector(const std::string& path, const Vector& v) {
  write_matrix(path, Matrix(v));
}

/// Grayscale image with pixels rescaled to [0, 1].
struct Pgm {
  int rows = 0;
  int cols = 0;
  Vector pixels;  // row-major, length rows*cols
};

namespace detail {

inline int next_pgm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments, then reads one nonnegative integer.
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) throw io_error(path + ": malformed PGM header");
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1000000000L) throw io_error(path + ": PGM header value out of range");
    c = in.get();
  }
  if (c != EOF) in.unget();
  return static_cast<int>(value);
}

}  // namespace detail

/// Reads P2 (ASCII) or P5 (binary) grayscale, 8-bit only. P1/P3/P6 and
/// 16-bit files are rejected with an explicit message.
inline Pgm read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open for reading");
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || (m1 != '2' && m1 != '5')) {
    throw io_error(path + ": unsupported PGM variant '" + std::string{m0, m1} +
                   "' (only P2 and P5 grayscale are supported)");
  }
  const bool binary = m1 == '5';
  const int cols = detail::next_pgm_token(in, path);
  const int rows = detail::next_pgm_token(in, path);
  const int maxval = detail::next_pgm_token(in, path);
  if (cols < 1 || rows < 1) throw io_error(path + ": bad PGM dimensions");
  if (maxval < 1 || maxval > 255) {
    throw io_error(path + ": PGM maxval " + std::to_string(maxval) +
                   " unsupported (8-bit only)");
  }

  Pgm img;
  img.rows = rows;
  img.cols = cols;
  img.pixels.resize(static_cast<Eigen::Index>(rows) * cols);
  const double denom = maxval;
  if (binary) {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (!in) throw io_error(path + ": truncated PGM payload");
    for (std::size_t i = 0; i < raw.size(); ++i) {
      img.pixels[static_cast<Eigen::Index>(i)] = raw[i] / denom;
    }
  } else {
    for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
      const int v = detail::next_pgm_token(in, path);
      if (v > maxval) throw io_error(path + ": pixel exceeds maxval");
      img.pixels[i] = v / denom;
    }
  }
  return img;
}

/// Writes P5 with maxval 255; values are clamped to [0, 1] and quantized.
inline void write_pgm(const std::string& path, int rows, int cols, const Vector& x) {
  if (x.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw std::invalid_argument("write_pgm: pixel count does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = x[i];
    if (!(v > 0.0)) v = 0.0;
    if (v > 1.0) v = 1.0;
    raw[static_cast<std::size_t>(i)] =
        static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw io_error(path + ": write failed");
}

/// Adjacency list: one line per index, `i: j k l` with 0-based neighbors.
/// Every index in [0, n) must appear exactly once; empty neighbor sets,
/// self-loops, and out-of-range indices are rejected.
inline NeighborTopology read_adjacency(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open for reading");
  std::vector<std::pair<int, std::vector<int>>> parsed;
  std::string line;
  std::size_t line_no = 0;
  int max_index = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) {
      throw io_error(path + ":" + std::to_string(line_no) + ": missing ':'");
    }
    std::istringstream head(line.substr(0, colon));
    int idx = -1;
    if (!(head >> idx) || idx < 0) {
      throw io_error(path + ":" + std::to_string(line_no) + ": bad index");
    }
    std::istringstream tail(line.substr(colon + 1));
    std::vector<int> nbrs;
    int j;
    while (tail >> j) nbrs.push_back(j);
    std::string trailing;
    tail.clear();
    if (tail >> trailing) {
      throw io_error(path + ":" + std::to_string(line_no) + ": trailing junk");
    }
    if (nbrs.empty()) {
      throw io_error(path + ":" + std::to_string(line_no) + ": empty neighbor set");
    }
    max_index = std::max(max_index, idx);
    parsed.emplace_back(idx, std::move(nbrs));
  }
  if (parsed.empty()) throw io_error(path + ": empty adjacency file");
  const int n = max_index + 1;
  std::vector<std::vector<int>> adjacency(n);
  std::vector<bool> seen(n, false);
  for (auto& [idx, nbrs] : parsed) {
    if (seen[idx]) {
      throw io_error(path + ": duplicate entry for index " + std::to_string(idx));
    }
    seen[idx] = true;
    adjacency[idx] = std::move(nbrs);
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw io_error(path + ": missing entry for index " + std::to_string(i));
    }
  }
  try {
    return NeighborTopology::custom(std::move(adjacency));
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
}

}  // namespace ampnnspl::io

#endif  // AMPNNSPL_IO_HPP
