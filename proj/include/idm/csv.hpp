#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "idm/integrator.hpp"

namespace idm {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_number(double v);

enum class Series { Position, Velocity, Acceleration };

/// Header `t,x_1,...,x_N` (or v_, a_); one row per sample, leader column first.
void write_series_csv(const std::filesystem::path& path, const Trajectory& tr, Series series);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with a single header line. Throws std::runtime_error
/// naming the offending line.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace idm
