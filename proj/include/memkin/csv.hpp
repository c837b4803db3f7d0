#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "memkin/errors.hpp"

namespace memkin {

/// RFC-4180-style CSV writer with deterministic number formatting
/// (17 significant digits, so doubles round-trip bit-exactly).
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw error("cannot open '" + path + "' for writing");
    }

    void header(const std::vector<std::string>& names) { row_strings(names); }

    void row(const std::vector<double>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += format(values[i]);
        }
        out_ << line << "\r\n";
    }

    void row_strings(const std::vector<std::string>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += values[i];
        }
        out_ << line << "\r\n";
    }

    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

  private:
    std::ofstream out_;
};

}  // namespace memkin
