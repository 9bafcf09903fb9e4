#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "helm/otb_io.hpp"
#include "helm/runlog.hpp"

namespace helm {

/// Column order of the run-log CSV; see docs/logformat.md.
const std::vector<std::string>& runlog_columns();

std::string format_runlog_csv(const RunLog& log);

/// Ground-truth and predicted boxes per record, as written to OTB files.
/// Frames where the target is out of view have no ground truth and are
/// skipped in both tracks.
struct BoxExport {
  BoxTrack gt;
  BoxTrack pred;
};
BoxExport export_boxes(const RunLog& log);

/// Numeric CSV table keyed by header name.
struct CsvTable {
  std::vector<std::string> header;
  std::map<std::string, std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};

CsvTable read_csv_table(const std::filesystem::path& path);

} // namespace helm
