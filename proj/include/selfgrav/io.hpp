#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfgrav/convex.hpp"
#include "selfgrav/energy_report.hpp"
#include "selfgrav/errors.hpp"
#include "selfgrav/radial.hpp"

namespace selfgrav {

inline constexpr int schema_version = 1;

/// Shortest round-trip-exact decimal form of a double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// A CSV payload: named columns of equal length, written with a schema comment
/// line ahead of the header.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; // data[c][row]
};

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) throw io_error("write_csv: cannot open " + path.string());
    out << "# schema-version " << schema_version << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    const std::size_t rows = t.data.empty() ? 0 : t.data.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < t.data.size(); ++c)
            out << format_double(t.data[c][r]) << (c + 1 < t.data.size() ? "," : "\n");
    }
    if (!out) throw io_error("write_csv: write failed for " + path.string());
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("read_csv: cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool header_done = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            t.data.resize(t.columns.size());
            header_done = true;
            continue;
        }
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= t.data.size())
                throw io_error("read_csv: too many fields at " + path.string() + ":" +
                               std::to_string(lineno));
            try {
                t.data[c].push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw io_error("read_csv: bad number '" + cell + "' at " + path.string() + ":" +
                               std::to_string(lineno));
            }
            ++c;
        }
        if (c != t.data.size())
            throw io_error("read_csv: short row at " + path.string() + ":" +
                           std::to_string(lineno));
    }
    return t;
}

/// Function table CSV: columns (abscissa, value, derivative).
inline void write_function_table(const std::filesystem::path& path,
                                 const ConvexScalarFunction& f, const TableRange& range = {}) {
    CsvTable t;
    t.columns = {"abscissa", "value", "derivative"};
    const auto xs = f.is_power_law()
                        ? log_spaced(range.lo, range.hi, range.n)
                        : f.sample_abscissae();
    t.data.resize(3);
    for (double x : xs) {
        t.data[0].push_back(x);
        t.data[1].push_back(f.value(x));
        t.data[2].push_back(f.derivative(x));
    }
    write_csv(path, t);
}

inline ConvexScalarFunction read_function_table(const std::filesystem::path& path,
                                                bool superlinear = true) {
    const CsvTable t = read_csv(path);
    if (t.columns != std::vector<std::string>{"abscissa", "value", "derivative"})
        throw io_error("read_function_table: expected header abscissa,value,derivative in " +
                       path.string());
    return ConvexScalarFunction::tabulated(t.data[0], t.data[1], t.data[2], superlinear);
}

/// Radial profile CSV with columns (r, value).
inline void write_radial_profile(const std::filesystem::path& path, const RadialDensity& rho) {
    CsvTable t;
    t.columns = {"r", "value"};
    t.data = {rho.grid().nodes(), rho.values()};
    write_csv(path, t);
}

inline RadialDensity read_radial_profile(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    if (t.columns != std::vector<std::string>{"r", "value"})
        throw io_error("read_radial_profile: expected header r,value in " + path.string());
    return RadialDensity(RadialGrid(t.data[0]), t.data[1]);
}

using json = nlohmann::ordered_json;

inline json energy_report_json(const EnergyReport& e) {
    json j;
    j["internal"] = e.internal;
    j["epot"] = e.epot;
    j["reduced_total"] = e.reduced_total;
    if (e.casimir) j["casimir"] = *e.casimir;
    if (e.kinetic) j["kinetic"] = *e.kinetic;
    if (e.total) j["total"] = *e.total;
    if (e.gap) j["gap"] = *e.gap;
    return j;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("write_json: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace selfgrav
