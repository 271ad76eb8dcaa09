#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "valvebench/errors.hpp"

namespace valvebench {

/// Deterministic CSV writer: '.' decimals, '\n' line ends, fixed %.12g
/// number formatting so identical runs produce identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path) {
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) throw DataError("cannot write '" + path + "'");
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    static std::string format(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return buf;
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format(values[i]);
        }
        out_ << '\n';
    }

    /// Mixed row: any cell may be preformatted text.
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

} // namespace valvebench
