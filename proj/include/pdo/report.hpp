#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pdo/symbol.hpp"

namespace pdo {

// Plain columnar data: comma-separated, one header row, numbers in %.17g.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double v);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);

// Symbol dump: '#'-prefixed header lines (backend, order, type, nx), then a
// header row and one row per (point, i, j[, x-index]).
void write_symbol_csv(const std::filesystem::path& path, const Symbol& a);

} // namespace pdo
