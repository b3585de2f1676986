#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "calib/data.hpp"

namespace calib {

// Input number formatting. Point: '.' decimals, ',' field separator.
// Comma: ',' decimals, ';' field separator (the convention of the bundled
// reference tables). Output is always point-style.
enum class Locale { Point, Comma };

// Reads a first-stage file (header "x,y" or "x;y", one pair per row) and a
// second-stage file (header "y0", one value per row). UTF-8, LF or CRLF.
// Throws ParseError with 1-based row/column on any malformed content; the
// returned data is validated (so ValidationError may propagate).
CalibrationData read_calibration_csv(const std::filesystem::path& first_stage,
                                     const std::filesystem::path& second_stage,
                                     Locale locale);

// Shortest round-trip decimal rendering of v (always point decimals).
std::string format_full(double v);

// Fixed 3-significant-figure rendering for display tables.
std::string format_display(double v);

}  // namespace calib
