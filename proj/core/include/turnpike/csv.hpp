#pragma once

#include "turnpike/errors.hpp"
#include "turnpike/linalg.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace turnpike {

/// Minimal CSV emitter: one `#` comment line naming the columns, then rows of
/// decimal values printed with 17 significant digits so identical runs are
/// byte-identical.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw InvalidArgument("cannot open CSV output: " + path);
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << format(values[i]);
        }
        out_ << "\n";
    }

    static std::string format(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

private:
    std::ofstream out_;
};

}  // namespace turnpike
