#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "symcon/energy.hpp"
#include "symcon/evaluate.hpp"
#include "symcon/kinematics.hpp"

namespace symcon {

/// Which quantity feeds each damage-program input, in program order.
enum class DamageInput { Psi, PsiMax, T };

struct DamageModel {
    ExpressionProgram program;
    std::vector<DamageInput> layout = { DamageInput::Psi, DamageInput::PsiMax };
};

inline std::pair<double, bool> damage_value(const DamageModel& m, double psi, double psi_max,
                                            std::optional<double> t_scaled = std::nullopt) {
    double in[4];
    for (std::size_t i = 0; i < m.layout.size(); ++i) {
        switch (m.layout[i]) {
            case DamageInput::Psi: in[i] = psi; break;
            case DamageInput::PsiMax: in[i] = psi_max; break;
            case DamageInput::T:
                if (!t_scaled) throw std::logic_error("damage model expects a temperature input");
                in[i] = *t_scaled;
                break;
        }
    }
    return evaluate_row(m.program, in);
}

/// P = eta(psi_max, psi) * P0. Invalid eta evaluations invalidate the stress.
inline std::pair<double, bool> apply_damage(const DamageModel& m, double psi, double psi_max,
                                            double p0,
                                            std::optional<double> t_scaled = std::nullopt) {
    auto [eta, ok] = damage_value(m, psi, psi_max, t_scaled);
    if (!ok) return { 0.0, false };
    return { eta * p0, true };
}

struct PsiHistoryPoint {
    double psi = 0.0;
    double psi_max = 0.0;
    bool valid = true;
};

/// Shifted energy and its running maximum along a load-history-ordered path.
inline std::vector<PsiHistoryPoint> accumulate_psi_max(const EnergyModel& model,
                                                       const std::vector<DeformationState>& path) {
    std::vector<PsiHistoryPoint> out;
    out.reserve(path.size());
    double running = -std::numeric_limits<double>::infinity();
    for (const auto& state : path) {
        auto [psi, ok] = energy_value(model, state);
        PsiHistoryPoint pt;
        pt.valid = ok;
        pt.psi = ok ? psi : 0.0;
        if (ok) running = std::max(running, psi);
        pt.psi_max = running;
        out.push_back(pt);
    }
    return out;
}

}  // namespace symcon
