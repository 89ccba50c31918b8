#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hdea/error.hpp"

// CSV dialect used for every artifact this project writes: comma separator,
// '.' decimal point, one header row, LF line endings (files are opened in
// binary mode so the bytes are platform-independent). Doubles are written in
// shortest round-trip form; NaN as "nan".

namespace hdea::csv {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw ParameterError("double formatting failed");
    return std::string(buf, ptr);
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw ParameterError("cannot open for writing: " + path.string());
        path_ = path.string();
    }

    void raw_row(std::string_view row) {
        out_ << row << '\n';
        if (!out_) throw ParameterError("write failed: " + path_);
    }

    void row(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line.push_back(',');
            line += cells[i];
        }
        raw_row(line);
    }

private:
    std::ofstream out_;
    std::string path_;
};

// One named column from a headered CSV file.
inline std::vector<double> read_column(const std::filesystem::path& path,
                                       const std::string& column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV: " + path.string(), 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) col = i;
    if (col == header.size())
        throw ParseError("column '" + column + "' not found in " + path.string(), 1);

    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t i = 0;
        bool found = false;
        while (std::getline(ss, cell, ',')) {
            if (i++ == col) {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                    if (cell == "nan")
                        v = std::numeric_limits<double>::quiet_NaN();
                    else
                        throw ParseError("bad numeric cell '" + cell + "'", line_no);
                }
                values.push_back(v);
                found = true;
                break;
            }
        }
        if (!found) throw ParseError("row too short", line_no);
    }
    return values;
}

} // namespace hdea::csv
