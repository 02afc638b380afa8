// csv.hpp — deterministic CSV output: RFC-4180-style quoting, shortest
// round-trip float formatting, write-then-rename.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fuzzproc {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Shortest decimal that round-trips to the same double.
std::string formatDouble(double x);

std::string toCsvText(const CsvTable& table);

// Writes to <path>.tmp then renames, so failures never leave a partial file.
void writeCsvAtomic(const CsvTable& table, const std::filesystem::path& path);

CsvTable readCsv(const std::filesystem::path& path);

}  // namespace fuzzproc
