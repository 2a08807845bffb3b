#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fracwave/types.hpp"

namespace fracwave::io {

/// Opens path for writing (creating parent directories); throws on failure.
std::ofstream open_output(const std::filesystem::path& path);

/// Fixed-format decimal with round-trip precision.
std::string format_number(double value);

/// header row, then one line per row of the table.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// t,value
void write_time_series(const std::filesystem::path& path, const TimeGrid& grid,
                       const std::vector<double>& values);

/// t,<prefix>_0,<prefix>_1,...; columns of values are time steps.
void write_wide_series(const std::filesystem::path& path, const TimeGrid& grid,
                       const Matrix& values, const std::string& prefix);

}  // namespace fracwave::io
