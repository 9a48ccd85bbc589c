#pragma once

// Grid field files: a CSV dump (one row per node: coordinates, value) next
// to a JSON header {n, h, extent, dims, points, data}.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypercone/error.hpp"
#include "hypercone/graph_geometry.hpp"
#include "hypercone/io.hpp"

namespace hypercone::io {

/// Writes `<stem>.csv` and `<stem>.json`; returns the header path.
inline std::filesystem::path write_field(const std::filesystem::path& stem, int n, const GridField& f) {
  const Grid& g = f.grid;
  std::vector<std::string> header;
  for (int a = 0; a < g.dims(); ++a) header.push_back("x" + std::to_string(a));
  header.push_back("value");
  std::string text;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text += (i ? "," : "") + cells[i];
    text += "\r\n";
  };
  line(header);
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<std::string> cells;
    for (double c : g.point(i)) cells.push_back(format_number(c));
    cells.push_back(format_number(f.values[i]));
    line(cells);
  }
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path meta = stem;
  meta += ".json";
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw Error("cannot open '" + csv.string() + "' for writing");
    out << text;
  }
  const json j{{"n", n},           {"h", g.h()},           {"extent", g.extent()},
               {"dims", g.dims()}, {"points", g.points()}, {"data", csv.filename().string()}};
  std::ofstream out(meta);
  if (!out) throw Error("cannot open '" + meta.string() + "' for writing");
  out << j.dump(2) << '\n';
  return meta;
}

struct FieldFile {
  int n = 7;
  GridField field;
};

inline FieldFile read_field(const std::filesystem::path& header) {
  const json j = read_json_file(header.string());
  const int dims = detail::integer(detail::require(j, "dims"), "dims");
  const int points = detail::integer(detail::require(j, "points"), "points");
  const double extent = detail::number(detail::require(j, "extent"), "extent");
  const Grid g(dims, points, extent);
  const double h = detail::number(detail::require(j, "h"), "h");
  if (std::abs(h - g.h()) > 1e-12 * g.h()) throw Error("header h does not match extent and points");
  const auto data = header.parent_path() / detail::text(detail::require(j, "data"), "data");
  std::ifstream in(data, std::ios::binary);
  if (!in) throw Error("cannot open '" + data.string() + "'");
  std::string row;
  std::getline(in, row);
  std::vector<double> values;
  while (std::getline(in, row)) {
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    const auto comma = row.rfind(',');
    values.push_back(std::stod(row.substr(comma + 1)));
  }
  if (values.size() != g.size()) throw Error("field file has " + std::to_string(values.size()) + " rows, expected " +
                                             std::to_string(g.size()));
  return {detail::integer(detail::require(j, "n"), "n"), GridField(g, std::move(values))};
}

}  // namespace hypercone::io
