#include "pmm/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pmm::harness {

namespace {

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InvalidArgument("cannot write " + path);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

// ---------------------------------------------------------------- CSV

Mat read_csv_matrix(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      std::string f = trim(field);
      std::size_t col = pos + field.find_first_not_of(" \t") + 1;
      if (f.empty()) throw ParseError(source, lineno, pos + 1, "empty field");
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError(source, lineno, col, "not a number: '" + f + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source, lineno, 1,
                       "expected " + std::to_string(rows.front().size()) + " fields, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Mat(0, 0);
  Mat m(Index(rows.size()), Index(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(Index(i), Index(j)) = rows[i][j];
  return m;
}

Mat read_csv_matrix_file(const std::string& path) {
  auto in = open_in(path);
  return read_csv_matrix(in, path);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_csv_matrix(std::ostream& out, const Mat& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_csv_matrix_file(const std::string& path, const Mat& m) {
  auto out = open_out(path);
  write_csv_matrix(out, m);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<std::string>& row) {
  if (row.size() != header_.size()) throw InvalidArgument("csv: row width differs from header");
  rows_.push_back(row);
}

std::string CsvWriter::str() const {
  auto field = [](const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << field(r[i]);
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void CsvWriter::write_file(const std::string& path) const {
  auto out = open_out(path);
  out << str();
}

// ---------------------------------------------------------------- PGM

namespace {

class HeaderReader {
 public:
  HeaderReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  int get() {
    int c = in_.get();
    if (c == '\n') {
      ++line_;
      col_ = 0;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (true) {
      int c = in_.peek();
      if (c == '#') {
        while (c != '\n' && c != EOF) c = get();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else {
        return;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    std::size_t l = line_, c = col_ + 1;
    std::string digits;
    while (std::isdigit(in_.peek())) digits += char(get());
    if (digits.empty()) throw ParseError(source_, l, c, std::string("expected ") + what);
    if (digits.size() > 9) throw ParseError(source_, l, c, std::string(what) + " out of range");
    return std::stol(digits);
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, col_ + 1, what); }
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 1, col_ = 0;
};

}  // namespace

Image read_pgm(std::istream& in, const std::string& source) {
  HeaderReader h(in, source);
  int p = h.get(), k = h.get();
  if (p != 'P' || (k != '2' && k != '5')) throw ParseError(source, 1, 1, "not a P2/P5 graymap");
  const bool binary = k == '5';
  long width = h.number("width");
  long height = h.number("height");
  long maxval = h.number("maxval");
  if (width <= 0 || height <= 0) h.fail("image dimensions must be positive");
  if (maxval <= 0 || maxval > 65535) h.fail("maxval must be in 1..65535");
  Image img;
  img.rows = height;
  img.cols = width;
  img.pixels.resize(height * width);
  if (binary) {
    int c = h.get();
    if (c != ' ' && c != '\n' && c != '\t' && c != '\r') h.fail("expected whitespace before raster");
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(std::size_t(width * height * bytes));
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (in.gcount() != std::streamsize(buf.size())) h.fail("raster truncated");
    for (Index i = 0; i < img.pixels.size(); ++i) {
      long v = bytes == 1 ? buf[std::size_t(i)] : (long(buf[std::size_t(2 * i)]) << 8) | buf[std::size_t(2 * i + 1)];
      if (v > maxval) h.fail("sample exceeds maxval");
      img.pixels[i] = double(v) / double(maxval);
    }
  } else {
    for (Index i = 0; i < img.pixels.size(); ++i) {
      long v = h.number("sample");
      if (v > maxval) h.fail("sample exceeds maxval");
      img.pixels[i] = double(v) / double(maxval);
    }
  }
  return img;
}

Image read_pgm_file(const std::string& path) {
  auto in = open_in(path, true);
  return read_pgm(in, path);
}

void write_pgm(std::ostream& out, const Image& img, bool binary, int maxval) {
  if (maxval <= 0 || maxval > 65535) throw InvalidArgument("pgm: maxval must be in 1..65535");
  if (img.pixels.size() != img.rows * img.cols) throw InvalidArgument("pgm: pixel count mismatch");
  out << (binary ? "P5" : "P2") << '\n' << img.cols << ' ' << img.rows << '\n' << maxval << '\n';
  auto q = [&](double v) {
    double c = std::min(1.0, std::max(0.0, std::isnan(v) ? 0.0 : v));
    return long(std::lround(c * maxval));
  };
  if (binary) {
    for (Index i = 0; i < img.pixels.size(); ++i) {
      long v = q(img.pixels[i]);
      if (maxval >= 256) out.put(char((v >> 8) & 0xff));
      out.put(char(v & 0xff));
    }
  } else {
    for (Index r = 0; r < img.rows; ++r) {
      for (Index c = 0; c < img.cols; ++c) out << (c ? " " : "") << q(img.pixels[r * img.cols + c]);
      out << '\n';
    }
  }
}

void write_pgm_file(const std::string& path, const Image& img, bool binary, int maxval) {
  auto out = open_out(path, true);
  write_pgm(out, img, binary, maxval);
}

// ---------------------------------------------------------------- config

std::map<std::string, std::string> parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    std::string body = hash == std::string::npos ? line : line.substr(0, hash);
    if (trim(body).empty()) continue;
    std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ParseError(source, lineno, body.find_first_not_of(" \t") + 1, "expected key = value");
    std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError(source, lineno, eq + 1, "missing key before '='");
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
        throw ParseError(source, lineno, body.find(key) + 1, "invalid key '" + key + "'");
    if (out.count(key)) throw ParseError(source, lineno, body.find(key) + 1, "duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  auto in = open_in(path);
  return parse_config(in, path);
}

}  // namespace pmm::harness
