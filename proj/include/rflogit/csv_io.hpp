#pragma once

// Plain CSV files: UTF-8, ',' delimiter, '.' decimal point, LF line endings.
//
// Curves: header row with the grid values t_0..t_{J-1}, then one row per curve.
// Response: one 0/1 value per line, no header.

#include "rflogit/funcsample.hpp"
#include "rflogit/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace rflogit {

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

RawCurves parse_curves_csv(std::string_view text);
Vector parse_response_csv(std::string_view text);

RawCurves read_curves_csv(const std::filesystem::path& path);
Vector read_response_csv(const std::filesystem::path& path);

void write_curves_csv(std::ostream& out, const RawCurves& curves);
void write_response_csv(std::ostream& out, const Vector& y);
void write_curves_csv(const std::filesystem::path& path, const RawCurves& curves);
void write_response_csv(const std::filesystem::path& path, const Vector& y);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rflogit
