#include "idm/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace idm {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_csv(const std::filesystem::path& path, const Trajectory& tr, Series series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const char prefix = series == Series::Position ? 'x' : series == Series::Velocity ? 'v' : 'a';
  const std::size_t n = tr.vehicle_count();
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ',' << prefix << '_' << i;
  out << '\n';
  for (const auto& smp : tr.samples) {
    out << format_number(smp.t());
    for (std::size_t i = 0; i < n; ++i) {
      const double value = series == Series::Position   ? smp.state.vehicles[i].x
                           : series == Series::Velocity ? smp.state.vehicles[i].v
                                                        : smp.accel[i];
      out << ',' << format_number(value);
    }
    out << '\n';
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": '" + cell + "' is not a number");
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " columns");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace idm
