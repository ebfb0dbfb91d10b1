#include "pmm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace pmm::linops {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Tokenizer {
  const std::string& line;
  std::size_t pos = 0;
  std::size_t lineno;
  const std::string& source;

  bool next(std::string_view& tok, std::size_t& col) {
    while (pos < line.size() && std::isspace((unsigned char)line[pos])) ++pos;
    if (pos >= line.size()) return false;
    std::size_t start = pos;
    while (pos < line.size() && !std::isspace((unsigned char)line[pos])) ++pos;
    tok = std::string_view(line).substr(start, pos - start);
    col = start + 1;
    return true;
  }

  long long integer(const char* what) {
    std::string_view tok;
    std::size_t col;
    if (!next(tok, col)) throw ParseError(source, lineno, line.size() + 1, std::string("missing ") + what);
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ParseError(source, lineno, col, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
    return v;
  }

  double real(const char* what) {
    std::string_view tok;
    std::size_t col;
    if (!next(tok, col)) throw ParseError(source, lineno, line.size() + 1, std::string("missing ") + what);
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ParseError(source, lineno, col, std::string("expected number ") + what + ", got '" + std::string(tok) + "'");
    return v;
  }

  void expect_end() {
    std::string_view tok;
    std::size_t col;
    if (next(tok, col)) throw ParseError(source, lineno, col, "unexpected trailing token '" + std::string(tok) + "'");
  }
};

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace((unsigned char)c)) return false;
  }
  return true;
}

}  // namespace

SpMat read_matrix_market(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, 1, "empty input");
  ++lineno;
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError(source, 1, 1, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError(source, 1, line.find(' ') + 2, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array")
    throw ParseError(source, 1, 1, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double" && !(field == "pattern" && format == "coordinate"))
    throw ParseError(source, 1, 1, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw ParseError(source, 1, 1, "unsupported symmetry '" + symmetry + "'");
  const bool pattern = field == "pattern";
  const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
  const bool sym = symmetry != "general";

  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) break;
    line.clear();
  }
  if (line.empty()) throw ParseError(source, lineno, 1, "missing size line");
  Tokenizer sz{line, 0, lineno, source};
  long long rows = sz.integer("row count");
  long long cols = sz.integer("column count");
  if (rows < 0 || cols < 0) throw ParseError(source, lineno, 1, "negative dimension");
  std::vector<Triplet> trips;

  if (format == "coordinate") {
    long long nnz = sz.integer("entry count");
    sz.expect_end();
    trips.reserve(std::size_t(nnz) * (sym ? 2 : 1));
    long long seen = 0;
    while (seen < nnz && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      Tokenizer t{line, 0, lineno, source};
      long long i = t.integer("row index");
      long long j = t.integer("column index");
      double v = pattern ? 1.0 : t.real("value");
      t.expect_end();
      if (i < 1 || i > rows) throw ParseError(source, lineno, 1, "row index out of range");
      if (j < 1 || j > cols) throw ParseError(source, lineno, 1, "column index out of range");
      trips.emplace_back(int(i - 1), int(j - 1), v);
      if (sym && i != j) trips.emplace_back(int(j - 1), int(i - 1), mirror * v);
      ++seen;
    }
    if (seen < nnz)
      throw ParseError(source, lineno + 1, 1, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
  } else {
    sz.expect_end();
    // column-major; symmetric stores the lower triangle only
    long long r = 0, c = 0;
    while (c < cols && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      Tokenizer t{line, 0, lineno, source};
      double v = t.real("value");
      t.expect_end();
      if (v != 0.0) {
        trips.emplace_back(int(r), int(c), v);
        if (sym && r != c) trips.emplace_back(int(c), int(r), mirror * v);
      }
      ++r;
      if (r == rows) {
        ++c;
        r = sym ? c : 0;
      }
    }
    if (c < cols && rows > 0) throw ParseError(source, lineno + 1, 1, "array data ended early");
  }
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

SpMat read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return read_matrix_market(in, path);
}

Mat read_matrix_market_dense_file(const std::string& path) { return Mat(read_matrix_market_file(path)); }

void write_matrix_market(std::ostream& out, const SpMat& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < m.outerSize(); ++j)
    for (SpMat::InnerIterator it(m, j); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market_file(const std::string& path, const SpMat& m) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  write_matrix_market(out, m);
}

}  // namespace pmm::linops
