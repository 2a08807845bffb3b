#include "fracwave/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace fracwave::io {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return os;
}

std::string format_number(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    auto os = open_output(path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::invalid_argument("write_csv: ragged row");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
}

void write_time_series(const std::filesystem::path& path, const TimeGrid& grid,
                       const std::vector<double>& values) {
    if (values.size() != grid.n_nodes()) throw std::invalid_argument("write_time_series: size mismatch");
    auto os = open_output(path);
    os << "t,value\n";
    for (std::size_t n = 0; n < values.size(); ++n)
        os << format_number(grid.t(n)) << ',' << format_number(values[n]) << '\n';
}

void write_wide_series(const std::filesystem::path& path, const TimeGrid& grid, const Matrix& values,
                       const std::string& prefix) {
    if (static_cast<std::size_t>(values.cols()) != grid.n_nodes())
        throw std::invalid_argument("write_wide_series: one column per time step expected");
    auto os = open_output(path);
    os << 't';
    for (Eigen::Index k = 0; k < values.rows(); ++k) os << ',' << prefix << '_' << k;
    os << '\n';
    for (Eigen::Index n = 0; n < values.cols(); ++n) {
        os << format_number(grid.t(static_cast<std::size_t>(n)));
        for (Eigen::Index k = 0; k < values.rows(); ++k) os << ',' << format_number(values(k, n));
        os << '\n';
    }
}

}  // namespace fracwave::io
