#include "helm/runlog_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace helm {

const std::vector<std::string>& runlog_columns() {
  static const std::vector<std::string> cols{
      "t",        "x",      "y",        "psi",     "u",       "r",        "target_x",
      "target_y", "target_psi", "gt_valid", "gt_x", "gt_y",    "gt_w",     "gt_h",
      "det_valid", "det_x",  "det_y",    "det_w",   "det_h",   "det_score", "lidar_valid",
      "lidar_range", "mode", "u_ref",    "e_psi",   "e_y",     "e_d",      "psi_ref",
      "t1_cmd",   "t2_cmd", "thrust_left", "thrust_right"};
  return cols;
}

std::string format_runlog_csv(const RunLog& log) {
  std::string out;
  const auto& cols = runlog_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out += cols[i];
    out += i + 1 < cols.size() ? ',' : '\n';
  }
  const auto f = [](double v) { return format_double(v); };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const StepRecord& r : log.records) {
    const BoundingBox gt = r.gt_box.value_or(BoundingBox{nan, nan, nan, nan});
    const BoundingBox& det = r.detection.box;
    const int mode = static_cast<int>(r.command.mode);
    std::string row;
    row += f(r.t) + "," + f(r.state.pose.x) + "," + f(r.state.pose.y) + "," +
           f(r.state.pose.psi) + "," + f(r.state.u) + "," + f(r.state.r) + ",";
    row += f(r.target.x) + "," + f(r.target.y) + "," + f(r.target.psi) + ",";
    row += std::string(r.gt_box ? "1" : "0") + "," + f(gt.x) + "," + f(gt.y) + "," + f(gt.w) +
           "," + f(gt.h) + ",";
    row += std::string(r.detection.valid ? "1" : "0") + "," + f(det.x) + "," + f(det.y) + "," +
           f(det.w) + "," + f(det.h) + "," + f(r.detection.score) + ",";
    row += std::string(r.lidar ? "1" : "0") + "," + f(r.lidar.value_or(nan)) + ",";
    row += std::to_string(mode) + "," + f(r.command.u_ref) + "," + f(r.command.e_psi) + "," +
           f(r.command.e_y) + "," + f(r.command.e_d) + "," + f(r.psi_ref) + ",";
    row += f(r.commanded.total) + "," + f(r.commanded.differential) + "," + f(r.applied.left) +
           "," + f(r.applied.right) + "\n";
    out += row;
  }
  return out;
}

BoxExport export_boxes(const RunLog& log) {
  BoxExport ex;
  for (const StepRecord& r : log.records) {
    if (!r.gt_box) {
      continue;
    }
    ex.gt.emplace_back(r.gt_box);
    if (r.detection.valid) {
      ex.pred.emplace_back(r.detection.box);
    } else {
      ex.pred.emplace_back(std::nullopt);
    }
  }
  return ex;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  const auto it = columns.find(name);
  if (it == columns.end()) {
    throw IoError("CSV has no column '" + name + "'");
  }
  return it->second;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError(path.string() + ": empty file");
  }
  {
    std::stringstream hs(line);
    std::string name;
    while (std::getline(hs, name, ',')) {
      table.header.push_back(name);
      table.columns[name];
    }
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::stringstream rs(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(rs, cell, ',')) {
      if (col >= table.header.size()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": too many fields");
      }
      double v = std::numeric_limits<double>::quiet_NaN();
      if (cell != "nan") {
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) {
          throw IoError(path.string() + ":" + std::to_string(line_no) + ": invalid number '" +
                        cell + "'");
        }
      }
      table.columns[table.header[col]].push_back(v);
      ++col;
    }
    if (col != table.header.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(table.header.size()) + " fields");
    }
  }
  return table;
}

} // namespace helm
