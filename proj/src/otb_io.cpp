#include "helm/otb_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace helm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(const std::string& source, int line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw IoError(os.str());
}

double parse_field(std::string_view field, const std::string& source, int line) {
  field = trim(field);
  if (field == "nan" || field == "NaN" || field == "NAN") {
    return std::nan("");
  }
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    parse_fail(source, line, "invalid number '" + std::string(field) + "'");
  }
  return v;
}

} // namespace

BoxTrack parse_otb(const std::string& text, const std::string& source) {
  BoxTrack out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) {
      // Trailing blank lines are tolerated; interior ones are not.
      std::string rest;
      while (std::getline(in, rest)) {
        ++line_no;
        if (!trim(rest).empty()) {
          parse_fail(source, line_no, "data after blank line");
        }
      }
      break;
    }
    std::array<double, 4> v{};
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t comma = line.find(',', start);
      const bool last = k == 3;
      if (!last && comma == std::string_view::npos) {
        parse_fail(source, line_no, "expected 4 comma-separated fields");
      }
      if (last && comma != std::string_view::npos) {
        parse_fail(source, line_no, "more than 4 fields");
      }
      const std::string_view field =
          last ? line.substr(start) : line.substr(start, comma - start);
      v[k] = parse_field(field, source, line_no);
      start = comma + 1;
    }
    const int nans = std::isnan(v[0]) + std::isnan(v[1]) + std::isnan(v[2]) + std::isnan(v[3]);
    if (nans == 4) {
      out.emplace_back(std::nullopt);
      continue;
    }
    if (nans != 0) {
      parse_fail(source, line_no, "partially missing box");
    }
    if (v[2] < 0.0 || v[3] < 0.0) {
      parse_fail(source, line_no, "negative box size");
    }
    out.emplace_back(BoundingBox{v[0], v[1], v[2], v[3]});
  }
  return out;
}

BoxTrack read_otb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_otb(buf.str(), path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_otb(std::span<const std::optional<BoundingBox>> boxes) {
  std::string out;
  for (const auto& b : boxes) {
    if (!b) {
      out += "nan,nan,nan,nan\n";
      continue;
    }
    out += format_double(b->x) + "," + format_double(b->y) + "," + format_double(b->w) + "," +
           format_double(b->h) + "\n";
  }
  return out;
}

} // namespace helm
