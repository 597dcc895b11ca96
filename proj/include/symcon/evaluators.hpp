#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symcon/damage.hpp"
#include "symcon/energy.hpp"
#include "symcon/loading.hpp"
#include "symcon/reward.hpp"
#include "symcon/stress.hpp"

namespace symcon {

/// Incompressible regime: for a diagonal F the axial stress is linear in
/// the two energy derivatives, P11 = a psi_1 + b psi_2, so each training
/// row folds into four fixed stencil evaluations with precomputed weights.
class IncompressibleStressEvaluator final : public ResidualEvaluator {
public:
    IncompressibleStressEvaluator(const std::vector<LoadingPoint>& train_points,
                                  bool with_temperature = false,
                                  double fd_step_rel = kFdStepRel) {
        cols_ = with_temperature ? 3 : 2;
        const std::size_t n = train_points.size();
        if (n == 0) throw std::invalid_argument("stress evaluator: no training rows");
        stencil_ = InputMatrix(4 * n, cols_);
        weights_.resize(4 * n);
        targets_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const LoadingPoint& pt = train_points[i];
            const DeformationState s = deformation_state(pt.loading, pt.stretch);
            const double lam = s.F[0];
            const double lat = s.F[lateral_axis(s.loading)];
            const double a = 2.0 * (lam - lat * lat / lam);
            const double b = 2.0 * (s.I1 * lam - lam * lam * lam -
                                    (s.I1 * lat * lat - lat * lat * lat * lat) / lam);
            const double h1 = fd_step_rel * std::max(1.0, std::fabs(s.I1));
            const double h2 = fd_step_rel * std::max(1.0, std::fabs(s.I2));
            const double t = with_temperature ? pt.t_scaled().value() : 0.0;
            auto fill = [&](std::size_t r, double i1, double i2, double w) {
                stencil_.at(r, 0) = i1;
                stencil_.at(r, 1) = i2;
                if (with_temperature) stencil_.at(r, 2) = t;
                weights_[r] = w;
            };
            fill(4 * i + 0, s.I1 + h1, s.I2, a / (2.0 * h1));
            fill(4 * i + 1, s.I1 - h1, s.I2, -a / (2.0 * h1));
            fill(4 * i + 2, s.I1, s.I2 + h2, b / (2.0 * h2));
            fill(4 * i + 3, s.I1, s.I2 - h2, -b / (2.0 * h2));
            targets_[i] = pt.stress;
        }
    }

    bool predict(const ExpressionProgram& program, std::vector<double>& out) const override {
        thread_local BatchEvaluator be;
        thread_local EvaluationOutcome eo;
        be(program, stencil_, eo);
        if (!eo.all_valid()) return false;
        const std::size_t n = targets_.size();
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double p = 0.0;
            for (std::size_t j = 4 * i; j < 4 * i + 4; ++j) p += weights_[j] * eo.values[j];
            if (!std::isfinite(p)) return false;
            out[i] = p;
        }
        return true;
    }

    const std::vector<double>& target() const override { return targets_; }

private:
    std::size_t cols_;
    InputMatrix stencil_;
    std::vector<double> weights_;
    std::vector<double> targets_;
};

/// Nearly incompressible regime: candidate programs over (I1b, I2b, J).
/// Every prediction solves the traction-free lateral stretch with finite
/// difference derivatives of the candidate itself.
class NearlyIncompressibleStressEvaluator final : public ResidualEvaluator {
public:
    NearlyIncompressibleStressEvaluator(const std::vector<LoadingPoint>& train_points,
                                        double fd_step_rel = kFdStepRel,
                                        LateralSolveConfig solve = {})
        : fd_step_rel_(fd_step_rel), solve_(solve) {
        if (train_points.empty()) throw std::invalid_argument("stress evaluator: no training rows");
        for (const auto& pt : train_points) {
            rows_.emplace_back(pt.loading, pt.stretch);
            targets_.push_back(pt.stress);
        }
    }

    bool predict(const ExpressionProgram& program, std::vector<double>& out) const override {
        EnergyModel m;
        m.program = program;
        m.layout = { EnergyInput::Iso1, EnergyInput::Iso2, EnergyInput::J };
        m.fd_step_rel = fd_step_rel_;
        out.resize(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            StressPrediction p =
                pk1_nearly_incompressible(m, rows_[i].first, rows_[i].second, solve_);
            if (!p.valid) return false;
            out[i] = p.P11;
        }
        return true;
    }

    const std::vector<double>& target() const override { return targets_; }

private:
    double fd_step_rel_;
    LateralSolveConfig solve_;
    std::vector<std::pair<LoadingCase, double>> rows_;
    std::vector<double> targets_;
};

/// Per-point energy history of a cyclic data set under a fitted energy
/// model: shifted psi, its running maximum, and the undamaged stress P0.
struct EnergyHistory {
    std::vector<double> psi, psi_max, p0;
    std::vector<char> valid;
};

/// Points are grouped by (loading case, temperature); each group must be in
/// load-history order, which is how the generators and the csv schema store
/// them.
inline EnergyHistory energy_history(const std::vector<LoadingPoint>& points,
                                    const EnergyModel& energy) {
    EnergyHistory h;
    const std::size_t n = points.size();
    h.psi.assign(n, 0.0);
    h.psi_max.assign(n, 0.0);
    h.p0.assign(n, 0.0);
    h.valid.assign(n, 1);

    std::map<std::pair<int, double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i)
        groups[{ static_cast<int>(points[i].loading),
                 points[i].temperature_c.value_or(-1e9) }].push_back(i);

    for (auto& [key, rows] : groups) {
        std::vector<DeformationState> path;
        path.reserve(rows.size());
        for (std::size_t i : rows) {
            DeformationState s = deformation_state(points[i].loading, points[i].stretch);
            s.temperature_scaled = points[i].t_scaled();
            path.push_back(s);
        }
        auto hist = accumulate_psi_max(energy, path);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const std::size_t i = rows[k];
            h.psi[i] = hist[k].psi;
            h.psi_max[i] = hist[k].psi_max;
            if (!hist[k].valid) h.valid[i] = 0;
            StressPrediction p = pk1_incompressible(energy, path[k]);
            h.p0[i] = p.P11;
            if (!p.valid) h.valid[i] = 0;
        }
    }
    return h;
}

/// Damage step: candidate eta over (psi, psi_max[, T~]); prediction is
/// eta * P0 with P0 and the energy history precomputed from the step-1
/// model.
class DamageStressEvaluator final : public ResidualEvaluator {
public:
    DamageStressEvaluator(const std::vector<LoadingPoint>& train_points,
                          const EnergyHistory& train_history, bool with_temperature = false) {
        const std::size_t n = train_points.size();
        if (n == 0) throw std::invalid_argument("damage evaluator: no training rows");
        inputs_ = InputMatrix(n, with_temperature ? 3 : 2);
        p0_.resize(n);
        targets_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!train_history.valid[i])
                throw std::invalid_argument("damage evaluator: invalid energy history row");
            inputs_.at(i, 0) = train_history.psi[i];
            inputs_.at(i, 1) = train_history.psi_max[i];
            if (with_temperature) inputs_.at(i, 2) = train_points[i].t_scaled().value();
            p0_[i] = train_history.p0[i];
            targets_[i] = train_points[i].stress;
        }
    }

    bool predict(const ExpressionProgram& program, std::vector<double>& out) const override {
        thread_local BatchEvaluator be;
        thread_local EvaluationOutcome eo;
        be(program, inputs_, eo);
        if (!eo.all_valid()) return false;
        out.resize(targets_.size());
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            out[i] = eo.values[i] * p0_[i];
            if (!std::isfinite(out[i])) return false;
        }
        return true;
    }

    const std::vector<double>& target() const override { return targets_; }

private:
    InputMatrix inputs_;
    std::vector<double> p0_;
    std::vector<double> targets_;
};

}  // namespace symcon
