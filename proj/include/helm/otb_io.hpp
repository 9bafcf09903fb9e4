#pragma once

// OTB-style box files: one frame per line, "x,y,w,h" in decimal, no header.
// A line "nan,nan,nan,nan" marks a frame without a prediction.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helm/core.hpp"

namespace helm {

using BoxTrack = std::vector<std::optional<BoundingBox>>;

/// Throws IoError (with file name and line number) on malformed input.
BoxTrack read_otb(const std::filesystem::path& path);
BoxTrack parse_otb(const std::string& text, const std::string& source = "<memory>");

std::string format_otb(std::span<const std::optional<BoundingBox>> boxes);

/// Shortest round-trip decimal form.
std::string format_double(double v);

} // namespace helm
