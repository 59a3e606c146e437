#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfgrav/config.hpp"
#include "selfgrav/convex.hpp"
#include "selfgrav/io.hpp"
#include "selfgrav/reduction.hpp"

namespace selfgrav {

/// A fully assembled model: the spatial cost Phi and the Emden-Fowler
/// right-hand side g, plus the phase-space chain (Q, Q*, Phi*) when the model
/// was specified through Q.
struct Model {
    std::optional<ConvexScalarFunction> q;
    std::optional<ConvexScalarFunction> q_star;
    std::optional<ConvexScalarFunction> phi_star;
    ConvexScalarFunction phi;
    GFunction g;
    std::vector<std::string> warnings;
};

inline ConvexScalarFunction build_function(const FunctionSpec& spec, bool is_q) {
    if (spec.kind == FunctionSpec::Kind::Polytrope) {
        if (is_q) return make_polytrope_q(spec.exponent, spec.coeff);
        return ConvexScalarFunction::power_law(spec.coeff, 1.0 + 1.0 / spec.exponent);
    }
    return read_function_table(spec.table);
}

/// Assemble Phi and g from the configuration. A q-specified model runs the
/// whole reduction pipeline Q -> Q* -> Phi* -> Phi with g = (Phi*)'; a
/// phi-specified model inverts Phi' directly.
inline Model build_model(const ModelConfig& cfg) {
    cfg.validate();
    Model m{{}, {}, {}, ConvexScalarFunction::power_law(1.0, 2.0), GFunction::power_law(1.0, 1.0), {}};
    if (cfg.q) {
        m.q = build_function(*cfg.q, true);
        if (cfg.q->kind == FunctionSpec::Kind::Polytrope &&
            !polytrope_k_admissible(cfg.q->exponent))
            m.warnings.push_back("polytropic exponent k outside (0, 3/2): the reduced exponent "
                                 "n = k + 3/2 leaves the admissible window (0,3)");
        m.q_star = conjugate(*m.q);
        m.phi_star = velocity_reduce(*m.q_star);
        m.phi = conjugate(*m.phi_star);
        m.g = emden_rhs(*m.q);
    } else {
        m.phi = build_function(*cfg.phi, false);
        if (m.phi.is_power_law()) {
            // g = (Phi')^{-1} of the power law, exact
            const double p = m.phi.power_exponent();
            const double n = 1.0 / (p - 1.0);
            const double c = std::pow(1.0 / (m.phi.power_coeff() * p), n);
            m.g = GFunction::power_law(c, n);
        } else {
            // tabulated: pairs (Phi'(x_j), x_j) are exactly the graph of g
            m.g = GFunction::tabulated(m.phi.sample_derivatives(), m.phi.sample_abscissae());
        }
    }
    return m;
}

} // namespace selfgrav
