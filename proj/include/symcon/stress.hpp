#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "symcon/energy.hpp"
#include "symcon/kinematics.hpp"

namespace symcon {

struct StressPrediction {
    double P11 = 0.0;  // axial first Piola-Kirchhoff stress, MPa
    double lateral = 1.0;
    bool valid = false;
};

// ---------------------------------------------------------------------------
// Incompressible regime. The hydrostatic pressure is eliminated analytically
// through the zero-traction condition on the lateral axis, which for a
// diagonal F reduces each stress component to
//   P_ii = 2 [ (psi_1 + I1 psi_2) l_i - psi_2 l_i^3 ] - p / l_i .
// ---------------------------------------------------------------------------

inline double pk1_incompressible_from_derivs(double psi1, double psi2,
                                             const DeformationState& s) {
    const double I1 = s.I1;
    auto component = [&](double l) {
        return 2.0 * ((psi1 + I1 * psi2) * l - psi2 * l * l * l);
    };
    const double axial = s.F[0];
    const double lat = s.F[lateral_axis(s.loading)];
    const double pressure = component(lat) * lat;
    return component(axial) - pressure / axial;
}

inline StressPrediction pk1_incompressible(const EnergyModel& model,
                                           const DeformationState& state) {
    EnergyDerivatives d = fd_energy_derivatives(model, state);
    if (!d.valid) return {};
    StressPrediction out;
    out.P11 = pk1_incompressible_from_derivs(d.d_iso1, d.d_iso2, state);
    out.lateral = state.F[lateral_axis(state.loading)];
    out.valid = std::isfinite(out.P11);
    return out;
}

// ---------------------------------------------------------------------------
// Nearly incompressible regime (volumetric-isochoric split). Diagonal
// component of the stress from the split constitutive equation:
//   P_ii = 2 (psi_1 + I1b psi_2) J^(-2/3) l_i - 2 psi_2 J^(-4/3) l_i^3
//          + [ J psi_J - 2/3 psi_1 I1b - 4/3 psi_2 I2b ] / l_i .
// ---------------------------------------------------------------------------

inline double pk1_split_component(const EnergyDerivatives& d, const DeformationState& s,
                                  int axis) {
    const double j23 = std::pow(s.J, -2.0 / 3.0);
    const double j43 = j23 * j23;
    const double l = s.F[axis];
    const double deviatoric =
        2.0 * (d.d_iso1 + s.I1_bar * d.d_iso2) * j23 * l - 2.0 * d.d_iso2 * j43 * l * l * l;
    const double volumetric =
        (s.J * d.d_J - (2.0 / 3.0) * d.d_iso1 * s.I1_bar - (4.0 / 3.0) * d.d_iso2 * s.I2_bar) / l;
    return deviatoric + volumetric;
}

struct LateralSolveConfig {
    double lower = 0.05;
    double upper_factor = 1.5;  // upper bound = factor * axial stretch
    int max_iterations = 100;
    double width_tol = 1e-13;
};

/// Incompressible lateral stretch, used as the root-solve starting guess.
inline double incompressible_lateral(LoadingCase c, double stretch) {
    switch (c) {
        case LoadingCase::UT: return 1.0 / std::sqrt(stretch);
        case LoadingCase::PS: return 1.0 / stretch;
        case LoadingCase::EBT: return 1.0 / (stretch * stretch);
    }
    return 1.0;
}

/// Finds the traction-free lateral stretch by bracketing the zero of the
/// lateral stress component and refining with a bisection-safeguarded secant
/// step. DerivFn: DeformationState -> EnergyDerivatives.
template <typename DerivFn>
std::optional<double> solve_lateral_stretch(DerivFn&& derivs, LoadingCase loading,
                                            double stretch,
                                            const LateralSolveConfig& cfg = {}) {
    const int lat_axis = lateral_axis(loading);
    auto traction = [&](double lt) -> std::optional<double> {
        DeformationState s = compressible_state(loading, stretch, lt);
        EnergyDerivatives d = derivs(s);
        if (!d.valid) return std::nullopt;
        double f = pk1_split_component(d, s, lat_axis);
        if (!std::isfinite(f)) return std::nullopt;
        return f;
    };

    const double lo_limit = cfg.lower;
    const double hi_limit = cfg.upper_factor * stretch;
    const double guess = std::clamp(incompressible_lateral(loading, stretch),
                                    lo_limit, hi_limit);

    auto fg = traction(guess);
    if (fg && *fg == 0.0) return guess;

    // Bracket around the incompressible guess, widening a few times before
    // falling back to a full geometric scan of the admissible interval.
    double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
    bool bracketed = false;
    for (double widen : { 0.05, 0.25, 1.0 }) {
        a = std::max(lo_limit, guess * (1.0 - widen));
        b = std::min(hi_limit, guess * (1.0 + widen));
        auto va = traction(a), vb = traction(b);
        if (va && vb && (*va) * (*vb) <= 0.0) {
            fa = *va; fb = *vb;
            bracketed = true;
            break;
        }
    }
    if (!bracketed) {
        constexpr int kScan = 33;
        const double ratio = std::pow(hi_limit / lo_limit, 1.0 / (kScan - 1));
        double prev_x = lo_limit;
        auto prev_f = traction(prev_x);
        double best_dist = std::numeric_limits<double>::infinity();
        double x = lo_limit;
        for (int i = 1; i < kScan; ++i) {
            x *= ratio;
            auto fx = traction(x);
            if (prev_f && fx && (*prev_f) * (*fx) <= 0.0) {
                double mid = 0.5 * (prev_x + x);
                if (std::fabs(mid - guess) < best_dist) {
                    best_dist = std::fabs(mid - guess);
                    a = prev_x; b = x; fa = *prev_f; fb = *fx;
                    bracketed = true;
                }
            }
            prev_x = x;
            prev_f = fx;
        }
        if (!bracketed) return std::nullopt;
    }

    if (fa == 0.0) return a;
    if (fb == 0.0) return b;

    // Safeguarded secant: keep a valid bracket [a,b]; take the secant step
    // when it lands inside, otherwise bisect.
    double x0 = a, f0 = fa, x1 = b, f1 = fb;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (std::fabs(b - a) <= cfg.width_tol * std::max(1.0, std::fabs(b)))
            return 0.5 * (a + b);
        double x = 0.5 * (a + b);
        if (f1 != f0) {
            double xs = x1 - f1 * (x1 - x0) / (f1 - f0);
            if (xs > a && xs < b) x = xs;
        }
        auto fx = traction(x);
        if (!fx) return std::nullopt;  // bracket interior left the program's domain
        if (*fx == 0.0) return x;
        if (fa * (*fx) < 0.0) {
            b = x; fb = *fx;
        } else {
            a = x; fa = *fx;
        }
        x0 = x1; f0 = f1;
        x1 = x; f1 = *fx;
    }
    return 0.5 * (a + b);
}

/// Axial stress at the traction-free lateral state for a generic derivative
/// provider (finite differences for candidate programs, closed form for the
/// benchmark oracles).
template <typename DerivFn>
StressPrediction pk1_nearly_incompressible_with(DerivFn&& derivs, LoadingCase loading,
                                                double stretch,
                                                const LateralSolveConfig& cfg = {}) {
    auto lt = solve_lateral_stretch(derivs, loading, stretch, cfg);
    if (!lt) return {};
    DeformationState s = compressible_state(loading, stretch, *lt);
    EnergyDerivatives d = derivs(s);
    if (!d.valid) return {};
    StressPrediction out;
    out.P11 = pk1_split_component(d, s, 0);
    out.lateral = *lt;
    out.valid = std::isfinite(out.P11);
    return out;
}

inline StressPrediction pk1_nearly_incompressible(const EnergyModel& model, LoadingCase loading,
                                                  double stretch,
                                                  const LateralSolveConfig& cfg = {}) {
    return pk1_nearly_incompressible_with(
        [&](const DeformationState& s) { return fd_energy_derivatives(model, s); }, loading,
        stretch, cfg);
}

}  // namespace symcon
