#include "fuzzproc/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fuzzproc {

std::string formatDouble(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::string escapeField(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string toCsvText(const CsvTable& table) {
    std::ostringstream out;
    auto writeRow = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << escapeField(row[i]);
        }
        out << "\r\n";
    };
    writeRow(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::invalid_argument("CSV row width does not match header");
        writeRow(row);
    }
    return out.str();
}

void writeCsvAtomic(const CsvTable& table, const std::filesystem::path& path) {
    const std::string text = toCsvText(table);  // validate before touching disk
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("rename failed: " + ec.message());
}

CsvTable readCsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());

    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, first = true;
    auto endField = [&] { row.push_back(field); field.clear(); };
    auto endRow = [&] {
        endField();
        if (first) {
            table.header = row;
            first = false;
        } else {
            table.rows.push_back(row);
        }
        row.clear();
    };
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            endField();
        } else if (c == '\r') {
            // consumed with the following \n
        } else if (c == '\n') {
            endRow();
        } else {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) endRow();
    return table;
}

}  // namespace fuzzproc
