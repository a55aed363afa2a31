#pragma once

// CSV emission with a fixed float format (17 significant digits) so that
// reruns with identical config and seed are byte-identical.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace aemcmc {

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        (write_field(fields, std::exchange(first, false)), ...);
        out_ << "\n";
    }

  private:
    template <class T>
    void write_field(const T& v, bool first) {
        if (!first) out_ << ",";
        if constexpr (std::is_same_v<T, double>)
            out_ << csv_double(v);
        else
            out_ << v;
    }

    std::ofstream out_;
};

}  // namespace aemcmc
