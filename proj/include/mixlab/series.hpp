#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixlab {

inline constexpr const char* kSeriesSchema = "# mixlab series v1";

/// Aligned time-series columns of one scenario run. Bound columns are named
/// after their kind; compliance columns are 0/1 flags named compliance_<kind>.
struct MixingSeries {
  std::vector<double> t;
  std::vector<double> mix_f;
  std::vector<double> mix_g;
  std::vector<double> mix_g_bracket;
  std::vector<int> mix_g_saturated;
  std::vector<double> l1, l2, linf, h1;
  std::vector<std::pair<std::string, std::vector<double>>> bounds;
  std::vector<std::pair<std::string, std::vector<int>>> compliance;

  std::size_t rows() const { return t.size(); }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_series_csv(const std::string& path, const MixingSeries& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kSeriesSchema << "\n";
  out << "t,mix_f,mix_g,mix_g_bracket,mix_g_saturated,l1,l2,linf,h1";
  for (const auto& [name, col] : s.bounds) out << ',' << name;
  for (const auto& [name, col] : s.compliance) out << ',' << name;
  out << "\n";
  for (std::size_t i = 0; i < s.rows(); ++i) {
    out << detail::fmt_double(s.t[i]) << ',' << detail::fmt_double(s.mix_f[i]) << ','
        << detail::fmt_double(s.mix_g[i]) << ',' << detail::fmt_double(s.mix_g_bracket[i])
        << ',' << s.mix_g_saturated[i] << ',' << detail::fmt_double(s.l1[i]) << ','
        << detail::fmt_double(s.l2[i]) << ',' << detail::fmt_double(s.linf[i]) << ','
        << detail::fmt_double(s.h1[i]);
    for (const auto& [name, col] : s.bounds) out << ',' << detail::fmt_double(col[i]);
    for (const auto& [name, col] : s.compliance) out << ',' << col[i];
    out << "\n";
  }
}

inline MixingSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# mixlab series", 0) != 0)
    throw std::runtime_error("not a mixlab series file: " + path);
  if (!std::getline(in, line)) throw std::runtime_error("missing header row: " + path);
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  const std::vector<std::string> fixed = {"t",  "mix_f", "mix_g", "mix_g_bracket",
                                          "mix_g_saturated", "l1", "l2", "linf", "h1"};
  if (names.size() < fixed.size())
    throw std::runtime_error("series file lacks required columns: " + path);
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (names[i] != fixed[i])
      throw std::runtime_error("unexpected series column '" + names[i] + "' in " + path);

  MixingSeries s;
  for (std::size_t i = fixed.size(); i < names.size(); ++i) {
    if (names[i].rfind("compliance_", 0) == 0)
      s.compliance.emplace_back(names[i], std::vector<int>{});
    else
      s.bounds.emplace_back(names[i], std::vector<double>{});
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != names.size())
      throw std::runtime_error("ragged series row in " + path);
    std::size_t c = 0;
    s.t.push_back(std::stod(cells[c++]));
    s.mix_f.push_back(std::stod(cells[c++]));
    s.mix_g.push_back(std::stod(cells[c++]));
    s.mix_g_bracket.push_back(std::stod(cells[c++]));
    s.mix_g_saturated.push_back(std::stoi(cells[c++]));
    s.l1.push_back(std::stod(cells[c++]));
    s.l2.push_back(std::stod(cells[c++]));
    s.linf.push_back(std::stod(cells[c++]));
    s.h1.push_back(std::stod(cells[c++]));
    for (auto& [name, col] : s.bounds) col.push_back(std::stod(cells[c++]));
    for (auto& [name, col] : s.compliance) col.push_back(std::stoi(cells[c++]));
  }
  return s;
}

}  // namespace mixlab
