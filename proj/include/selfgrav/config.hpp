#pragma once

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "selfgrav/errors.hpp"

namespace selfgrav {

/// How the model is specified: a phase-space Casimir Q (polytropic or tabled),
/// or directly the spatial cost Phi.
struct FunctionSpec {
    enum class Kind { Polytrope, Table } kind = Kind::Polytrope;
    double exponent = 1.0;       ///< k for Q, n for Phi
    double coeff = 1.0;
    std::filesystem::path table; ///< CSV path when kind == Table
};

/// Parsed model configuration: exactly one of q/phi, the prescribed mass,
/// grid parameters and tolerances.
struct ModelConfig {
    std::optional<FunctionSpec> q;
    std::optional<FunctionSpec> phi;
    double mass = 1.0;
    std::size_t grid_nodes = 2000;
    double grid_rmax = 0.0; ///< 0 = choose from the support-bound estimate
    double tol_quadrature = 1e-11;
    double tol_ode = 1e-11;
    double tol_fixedpoint = 1e-9;
    std::optional<std::filesystem::path> exterior; ///< CSV (r,value)
    std::optional<std::filesystem::path> input;    ///< CSV input for rearrange
    std::vector<double> sweep_masses;

    void validate() const {
        if (q.has_value() == phi.has_value())
            throw config_error("config: exactly one of 'q' and 'phi' must be given");
        if (!(mass > 0.0)) throw config_error("config: mass must be positive");
        if (grid_nodes < 16) throw config_error("config: grid.nodes must be at least 16");
        if (!(tol_quadrature > 0.0 && tol_ode > 0.0 && tol_fixedpoint > 0.0))
            throw config_error("config: tolerances must be positive");
        if (phi && phi->kind == FunctionSpec::Kind::Polytrope &&
            !(phi->exponent > 0.0 && phi->exponent < 3.0))
            throw config_error("config: polytropic phi requires 0 < n < 3");
        if (q && q->kind == FunctionSpec::Kind::Polytrope && !(q->exponent > 0.0))
            throw config_error("config: polytropic q requires k > 0");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline FunctionSpec parse_function_spec(const std::string& raw, const std::string& key,
                                        int line) {
    FunctionSpec spec;
    const std::string v = trim(raw);
    const auto fail = [&](const std::string& why) {
        throw config_error("config line " + std::to_string(line) + ": " + key + ": " + why);
    };
    if (v.rfind("polytrope(", 0) == 0 && v.back() == ')') {
        spec.kind = FunctionSpec::Kind::Polytrope;
        try {
            spec.exponent = std::stod(v.substr(10, v.size() - 11));
        } catch (const std::exception&) {
            fail("bad polytrope exponent in '" + v + "'");
        }
    } else if (v.rfind("table:", 0) == 0) {
        spec.kind = FunctionSpec::Kind::Table;
        spec.table = trim(v.substr(6));
        if (spec.table.empty()) fail("empty table path");
    } else {
        fail("expected polytrope(<x>) or table:<path>, got '" + v + "'");
    }
    return spec;
}

inline double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw config_error("config line " + std::to_string(line) + ": " + key +
                           ": bad number '" + v + "'");
    }
}

} // namespace detail

/// Flat key-value config: one `key = value` per line, '#' comments.
inline ModelConfig parse_config_text(const std::string& text) {
    ModelConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    double coeff_q = 1.0, coeff_phi = 1.0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string s = detail::trim(line);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected key = value, got '" + s + "'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key == "q")
            cfg.q = detail::parse_function_spec(val, key, lineno);
        else if (key == "phi")
            cfg.phi = detail::parse_function_spec(val, key, lineno);
        else if (key == "q.coeff")
            coeff_q = detail::parse_double(val, key, lineno);
        else if (key == "phi.coeff")
            coeff_phi = detail::parse_double(val, key, lineno);
        else if (key == "mass")
            cfg.mass = detail::parse_double(val, key, lineno);
        else if (key == "grid.nodes")
            cfg.grid_nodes = static_cast<std::size_t>(detail::parse_double(val, key, lineno));
        else if (key == "grid.rmax")
            cfg.grid_rmax = detail::parse_double(val, key, lineno);
        else if (key == "tol.quadrature")
            cfg.tol_quadrature = detail::parse_double(val, key, lineno);
        else if (key == "tol.ode")
            cfg.tol_ode = detail::parse_double(val, key, lineno);
        else if (key == "tol.fixedpoint")
            cfg.tol_fixedpoint = detail::parse_double(val, key, lineno);
        else if (key == "exterior")
            cfg.exterior = val;
        else if (key == "input")
            cfg.input = val;
        else if (key == "sweep.masses") {
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ','))
                cfg.sweep_masses.push_back(detail::parse_double(detail::trim(item), key, lineno));
        } else
            throw config_error("config line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
    }
    if (cfg.q) cfg.q->coeff = coeff_q;
    if (cfg.phi) cfg.phi->coeff = coeff_phi;
    return cfg;
}

inline ModelConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace selfgrav
