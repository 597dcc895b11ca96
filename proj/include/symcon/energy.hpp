#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "symcon/evaluate.hpp"
#include "symcon/kinematics.hpp"
#include "symcon/program.hpp"

namespace symcon {

/// Which physical quantity feeds each program input, in program order.
/// Iso1/Iso2 mean I1/I2 of C in the incompressible regime and the isochoric
/// invariants when J is part of the layout.
enum class EnergyInput { Iso1, Iso2, J, T };

constexpr double kFdStepRel = 1e-5;

struct EnergyModel {
    ExpressionProgram program;
    std::vector<EnergyInput> layout = { EnergyInput::Iso1, EnergyInput::Iso2 };
    double shift = 0.0;                 // subtracted so psi(reference) = 0
    bool shift_per_temperature = false; // re-evaluate the shift at each point's T~
    double fd_step_rel = kFdStepRel;

    bool uses_J() const {
        for (auto i : layout)
            if (i == EnergyInput::J) return true;
        return false;
    }
    bool uses_T() const {
        for (auto i : layout)
            if (i == EnergyInput::T) return true;
        return false;
    }
    int index_of(EnergyInput which) const {
        for (std::size_t i = 0; i < layout.size(); ++i)
            if (layout[i] == which) return static_cast<int>(i);
        return -1;
    }
};

inline void state_inputs(const EnergyModel& m, const DeformationState& s, double* out) {
    const bool vol = m.uses_J();
    for (std::size_t i = 0; i < m.layout.size(); ++i) {
        switch (m.layout[i]) {
            case EnergyInput::Iso1: out[i] = vol ? s.I1_bar : s.I1; break;
            case EnergyInput::Iso2: out[i] = vol ? s.I2_bar : s.I2; break;
            case EnergyInput::J: out[i] = s.J; break;
            case EnergyInput::T:
                if (!s.temperature_scaled)
                    throw std::logic_error("energy model expects a temperature input");
                out[i] = *s.temperature_scaled;
                break;
        }
    }
}

inline std::array<double, 8> reference_inputs(const EnergyModel& m, std::optional<double> t_scaled) {
    std::array<double, 8> ref{};
    for (std::size_t i = 0; i < m.layout.size(); ++i) {
        switch (m.layout[i]) {
            case EnergyInput::Iso1:
            case EnergyInput::Iso2: ref[i] = 3.0; break;
            case EnergyInput::J: ref[i] = 1.0; break;
            case EnergyInput::T:
                if (!t_scaled) throw std::logic_error("reference state needs a temperature");
                ref[i] = *t_scaled;
                break;
        }
    }
    return ref;
}

/// Raw (unshifted) program value at explicit inputs.
inline std::pair<double, bool> raw_energy(const EnergyModel& m, const double* inputs) {
    return evaluate_row(m.program, inputs);
}

/// Shifted strain energy at a deformation state. For temperature-dependent
/// models the shift is the program value at (3, 3[, 1], T~) of this point.
inline std::pair<double, bool> energy_value(const EnergyModel& m, const DeformationState& s) {
    double in[8];
    state_inputs(m, s, in);
    auto [v, ok] = raw_energy(m, in);
    if (!ok) return { 0.0, false };
    if (m.shift_per_temperature) {
        auto ref = reference_inputs(m, s.temperature_scaled);
        auto [rv, rok] = raw_energy(m, ref.data());
        if (!rok) return { 0.0, false };
        return { v - rv, true };
    }
    return { v - m.shift, true };
}

struct EnergyDerivatives {
    double d_iso1 = 0.0;
    double d_iso2 = 0.0;
    double d_J = 0.0;
    bool valid = false;
};

/// Central finite differences with per-input step h = rel * max(1, |x|),
/// other inputs held fixed. Any invalid stencil point invalidates the result.
inline EnergyDerivatives fd_energy_derivatives_at(const EnergyModel& m, const double* inputs) {
    EnergyDerivatives d;
    double work[8];
    for (std::size_t i = 0; i < m.layout.size(); ++i) work[i] = inputs[i];

    auto diff = [&](int idx, double& out) -> bool {
        const double x = inputs[idx];
        const double h = m.fd_step_rel * std::max(1.0, std::fabs(x));
        work[idx] = x + h;
        auto [vp, okp] = raw_energy(m, work);
        work[idx] = x - h;
        auto [vm, okm] = raw_energy(m, work);
        work[idx] = x;
        if (!okp || !okm) return false;
        out = (vp - vm) / (2.0 * h);
        return std::isfinite(out);
    };

    for (std::size_t i = 0; i < m.layout.size(); ++i) {
        bool ok = true;
        switch (m.layout[i]) {
            case EnergyInput::Iso1: ok = diff(static_cast<int>(i), d.d_iso1); break;
            case EnergyInput::Iso2: ok = diff(static_cast<int>(i), d.d_iso2); break;
            case EnergyInput::J: ok = diff(static_cast<int>(i), d.d_J); break;
            case EnergyInput::T: break;  // temperature is a parameter, not differentiated
        }
        if (!ok) return d;
    }
    d.valid = true;
    return d;
}

inline EnergyDerivatives fd_energy_derivatives(const EnergyModel& m, const DeformationState& s) {
    double in[8];
    state_inputs(m, s, in);
    return fd_energy_derivatives_at(m, in);
}

/// Sets the normalization shift so the shifted energy vanishes at the
/// undeformed reference invariants. Temperature-dependent models switch to a
/// per-point shift instead of a single constant.
inline EnergyModel shift_energy(const EnergyModel& model,
                                std::optional<double> t_scaled = std::nullopt) {
    EnergyModel out = model;
    if (model.uses_T()) {
        out.shift = 0.0;
        out.shift_per_temperature = true;
        return out;
    }
    auto ref = reference_inputs(model, t_scaled);
    auto [v, ok] = raw_energy(model, ref.data());
    if (!ok) throw std::runtime_error("shift_energy: model invalid at the reference state");
    out.shift = v;
    out.shift_per_temperature = false;
    return out;
}

}  // namespace symcon
