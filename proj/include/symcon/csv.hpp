#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcon/infix.hpp"
#include "symcon/loading.hpp"

namespace symcon {

constexpr const char* kLoadingCsvHeader = "case,temperature_C,cycle,branch,stretch,stress_MPa";

/// Writes the documented schema: UTF-8, header row, decimal floats at full
/// precision, empty temperature field when absent. Byte-identical for
/// identical inputs.
inline void write_loading_csv(const std::vector<LoadingPoint>& points, std::ostream& os) {
    os << kLoadingCsvHeader << "\n";
    for (const auto& p : points) {
        os << to_string(p.loading) << ',';
        if (p.temperature_c) os << format_double(*p.temperature_c);
        os << ',' << p.cycle << ',' << to_string(p.branch) << ',' << format_double(p.stretch)
           << ',' << format_double(p.stress) << "\n";
    }
}

inline void write_loading_csv(const std::vector<LoadingPoint>& points, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_loading_csv(points, f);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail

/// Parses the schema above. Split tags are not part of the file format;
/// callers assign them according to their protocol.
inline std::vector<LoadingPoint> read_loading_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty file");
    {
        auto fields = detail::split_csv_line(line);
        std::string joined;
        for (std::size_t i = 0; i < fields.size(); ++i)
            joined += (i ? "," : "") + fields[i];
        if (joined != kLoadingCsvHeader)
            throw std::runtime_error("csv: unexpected header '" + line + "'");
    }
    std::vector<LoadingPoint> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 6)
            throw std::runtime_error("csv: line " + std::to_string(line_no) +
                                     ": expected 6 fields, got " + std::to_string(f.size()));
        LoadingPoint p;
        try {
            p.loading = loading_case_from_string(f[0]);
            if (!f[1].empty()) p.temperature_c = std::stod(f[1]);
            p.cycle = std::stoi(f[2]);
            p.branch = branch_from_string(f[3]);
            p.stretch = std::stod(f[4]);
            p.stress = std::stod(f[5]);
        } catch (const std::exception& e) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!(p.stretch > 0.0))
            throw std::runtime_error("csv: line " + std::to_string(line_no) +
                                     ": stretch must be positive");
        if (p.temperature_c && (*p.temperature_c < -100.0 || *p.temperature_c > 200.0))
            throw std::runtime_error("csv: line " + std::to_string(line_no) +
                                     ": temperature outside [-100, 200] C");
        out.push_back(p);
    }
    return out;
}

inline std::vector<LoadingPoint> read_loading_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_loading_csv(f);
}

/// Ingests a temperature-dependent cyclic data set and applies the
/// experimental split protocol: primary curves of -40/20/100/150 C train,
/// -20/60 C test; the 20 C cycles train the damage step, all other cycles
/// are test data.
inline std::vector<LoadingPoint> load_experimental_csv(const std::string& path) {
    auto points = read_loading_csv(path);
    std::map<std::pair<double, int>, double> last_primary;  // (T, case) -> last stretch
    for (auto& p : points) {
        if (!p.temperature_c)
            throw std::runtime_error("experimental csv: missing temperature field");
        const double T = *p.temperature_c;
        if (p.branch == Branch::primary && p.cycle == 0) {
            auto key = std::make_pair(T, static_cast<int>(p.loading));
            auto it = last_primary.find(key);
            if (it != last_primary.end() && p.stretch < it->second - 1e-12)
                throw std::runtime_error("experimental csv: non-monotone primary branch");
            last_primary[key] = p.stretch;
            const bool train = T == -40.0 || T == 20.0 || T == 100.0 || T == 150.0;
            p.split = train ? SplitTag::train : SplitTag::test_interp;
        } else {
            p.split = T == 20.0 ? SplitTag::train : SplitTag::test_extrap;
        }
    }
    return points;
}

}  // namespace symcon
