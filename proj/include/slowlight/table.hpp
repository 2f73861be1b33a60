#ifndef SLOWLIGHT_TABLE_HPP
#define SLOWLIGHT_TABLE_HPP

// Plot-ready columnar text tables.
//
//   # key = value          metadata, keys unique, in insertion order
//   # note: free text      diagnostics
//   # columns: a b_re b_im
//   # units: time field field
//   <whitespace-delimited rows, floats at 17 significant digits>
//
// Complex columns are split into <name>_re and <name>_im.

#include <charconv>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

namespace slowlight {

/// %.17g formatting; reads back bit-exactly.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    // from_chars rejects a leading '+', strtod does not.
    std::string tmp(s);
    char* end = nullptr;
    v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size() || tmp.empty()) {
      throw std::invalid_argument("not a number: '" + tmp + "'");
    }
  }
  return v;
}

struct Column {
  std::string name;
  std::string unit = "1";
  bool is_complex = false;
};

using Cell = std::variant<double, std::complex<double>>;

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns) : columns_(std::move(columns)) {}

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return meta_; }
  const std::vector<std::string>& notes() const { return notes_; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
      throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, table has " +
                                  std::to_string(columns_.size()) + " columns");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::holds_alternative<std::complex<double>>(row[i]) != columns_[i].is_complex) {
        throw std::invalid_argument("cell type does not match column '" + columns_[i].name + "'");
      }
    }
    rows_.push_back(std::move(row));
  }

  void set_meta(std::string key, std::string value) {
    for (const auto& [k, v] : meta_) {
      if (k == key) {
        throw std::logic_error("duplicate metadata key '" + key + "'");
      }
    }
    meta_.emplace_back(std::move(key), std::move(value));
  }
  void set_meta(std::string key, double value) { set_meta(std::move(key), format_number(value)); }
  void set_meta(std::string key, bool value) { set_meta(std::move(key), std::string(value ? "true" : "false")); }
  void set_meta(std::string key, const char* value) { set_meta(std::move(key), std::string(value)); }

  void add_note(std::string text) { notes_.push_back(std::move(text)); }

  /// The flattened column names, complex columns split into _re/_im.
  std::vector<std::string> flat_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) {
      if (c.is_complex) {
        out.push_back(c.name + "_re");
        out.push_back(c.name + "_im");
      } else {
        out.push_back(c.name);
      }
    }
    return out;
  }

  /// Rows with complex cells flattened to two doubles.
  std::vector<std::vector<double>> flat_rows() const {
    std::vector<std::vector<double>> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
      std::vector<double> flat;
      for (const auto& cell : row) {
        if (const auto* z = std::get_if<std::complex<double>>(&cell)) {
          flat.push_back(z->real());
          flat.push_back(z->imag());
        } else {
          flat.push_back(std::get<double>(cell));
        }
      }
      out.push_back(std::move(flat));
    }
    return out;
  }

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> notes_;
};

inline void emit_table(const Table& table, std::ostream& os) {
  for (const auto& [k, v] : table.metadata()) {
    os << "# " << k << " = " << v << '\n';
  }
  for (const auto& n : table.notes()) {
    os << "# note: " << n << '\n';
  }
  os << "# columns:";
  for (const auto& n : table.flat_names()) {
    os << ' ' << n;
  }
  os << '\n' << "# units:";
  for (const auto& c : table.columns()) {
    os << ' ' << c.unit;
    if (c.is_complex) {
      os << ' ' << c.unit;
    }
  }
  os << '\n';
  for (const auto& row : table.flat_rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) {
        os << ' ';
      }
      os << format_number(row[i]);
    }
    os << '\n';
  }
}

inline void emit_table(const Table& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  emit_table(table, os);
  os.flush();
  if (!os) {
    throw std::runtime_error("write to '" + path.string() + "' failed");
  }
}

/// A table read back from text. Numbers stay flat; complex columns are the
/// adjacent _re/_im pairs.
struct ParsedTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> notes;
  std::vector<std::string> columns;
  std::vector<std::string> units;
  std::vector<std::vector<double>> rows;

  const std::string* meta(std::string_view key) const {
    for (const auto& [k, v] : metadata) {
      if (k == key) {
        return &v;
      }
    }
    return nullptr;
  }

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) {
        return i;
      }
    }
    throw std::out_of_range("no column '" + std::string(name) + "'");
  }
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) {
    out.push_back(tok);
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace detail

inline ParsedTable parse_table(std::istream& is) {
  ParsedTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view sv = detail::trim(line);
    if (sv.empty()) {
      continue;
    }
    if (sv.front() == '#') {
      sv = detail::trim(sv.substr(1));
      if (sv.starts_with("columns:")) {
        t.columns = detail::split_ws(sv.substr(8));
      } else if (sv.starts_with("units:")) {
        t.units = detail::split_ws(sv.substr(6));
      } else if (sv.starts_with("note:")) {
        t.notes.emplace_back(detail::trim(sv.substr(5)));
      } else if (auto eq = sv.find(" = "); eq != std::string_view::npos) {
        t.metadata.emplace_back(std::string(detail::trim(sv.substr(0, eq))),
                                std::string(detail::trim(sv.substr(eq + 3))));
      } else {
        t.notes.emplace_back(sv);
      }
      continue;
    }
    std::vector<double> row;
    for (const auto& tok : detail::split_ws(sv)) {
      row.push_back(parse_number(tok));
    }
    if (!t.columns.empty() && row.size() != t.columns.size()) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(t.columns.size()) + " values, got " +
                               std::to_string(row.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline ParsedTable parse_table(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  return parse_table(is);
}

inline ParsedTable parse_table_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_table(is);
}

} // namespace slowlight

#endif
