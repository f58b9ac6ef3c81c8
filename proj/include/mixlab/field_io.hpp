#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixlab/scalar_field.hpp"

namespace mixlab {

// Headerless binary layout: uint64 little-endian resolution n, then n*n
// little-endian IEEE-754 doubles, row-major. Matches the CSV layout below.
inline void write_field_binary(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::uint64_t n = static_cast<std::uint64_t>(f.n);
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(f.samples.data()),
            static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline ScalarField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n == 0 || n > (1u << 16))
    throw std::runtime_error("bad field file header: " + path);
  std::vector<double> samples(static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(samples.data()),
          static_cast<std::streamsize>(samples.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated field file: " + path);
  return make_field(static_cast<int>(n), std::move(samples));
}

/// CSV export: n rows of n comma-separated values; row i holds f(i/n, j/n).
inline void write_field_csv(const std::string& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[40];
  for (int i = 0; i < f.n; ++i) {
    for (int j = 0; j < f.n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", f.at(i, j));
      out << buf << (j + 1 == f.n ? '\n' : ',');
    }
  }
}

inline ScalarField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<double> samples;
  std::string line;
  int rows = 0, cols = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      samples.push_back(std::stod(cell));
      ++c;
    }
    if (cols < 0) cols = c;
    if (c != cols) throw std::runtime_error("ragged CSV field file: " + path);
    ++rows;
  }
  if (rows != cols) throw std::runtime_error("CSV field file is not square: " + path);
  return make_field(rows, std::move(samples));
}

}  // namespace mixlab
