#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mgt/errors.hpp"

namespace mgt {

/// 17 significant digits, '.' decimal separator -- value-preserving and
/// byte-stable across runs.
std::string format_g17(double x);

/// CSV emitter with LF line endings regardless of platform.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(std::span<const double> values);

private:
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const; ///< ParameterError if absent
};

CsvTable read_csv(const std::filesystem::path& path);

} // namespace mgt
