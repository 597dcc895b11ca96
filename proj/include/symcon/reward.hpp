#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "symcon/evaluate.hpp"
#include "symcon/program.hpp"

namespace symcon {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Population standard deviation (the NRMSE normalizer: a mean predictor
/// scores NRMSE = 1 by construction).
inline double std_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline double rmse_of(const std::vector<double>& pred, const std::vector<double>& target) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - target[i];
        s += e * e;
    }
    return pred.empty() ? 0.0 : std::sqrt(s / static_cast<double>(pred.size()));
}

inline double r_squared(const std::vector<double>& pred, const std::vector<double>& target) {
    const double m = mean_of(target);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ss_res += (target[i] - pred[i]) * (target[i] - pred[i]);
        ss_tot += (target[i] - m) * (target[i] - m);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - ss_res / ss_tot;
}

/// Maps a candidate program to stress predictions over the training rows.
/// Implementations must be safely callable from many worker threads.
class ResidualEvaluator {
public:
    virtual ~ResidualEvaluator() = default;

    /// Fills `out` with one prediction per training row; returns false as
    /// soon as any row is domain-invalid or non-finite.
    virtual bool predict(const ExpressionProgram& program, std::vector<double>& out) const = 0;

    virtual const std::vector<double>& target() const = 0;
};

struct ScoredProgram {
    ExpressionProgram program;
    double reward = 0.0;
    double nrmse = std::numeric_limits<double>::infinity();
    double r2 = -std::numeric_limits<double>::infinity();
    std::size_t discovered_at = 0;  // global sample index, for tie-breaking
};

/// reward = 1 / (1 + NRMSE); programs with any invalid row score 0.
inline ScoredProgram compute_reward(const ExpressionProgram& program,
                                    const ResidualEvaluator& evaluator) {
    ScoredProgram s;
    s.program = program;
    thread_local std::vector<double> pred;
    if (!evaluator.predict(program, pred)) return s;
    const auto& y = evaluator.target();
    const double denom = std_of(y);
    const double rmse = rmse_of(pred, y);
    s.nrmse = denom > 0.0 ? rmse / denom : (rmse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    s.reward = std::isfinite(s.nrmse) ? 1.0 / (1.0 + s.nrmse) : 0.0;
    s.r2 = r_squared(pred, y);
    return s;
}

/// Plain y = f(x) regression over a fixed input matrix; the evaluator used
/// by the search unit tests.
class PlainRegressionEvaluator final : public ResidualEvaluator {
public:
    PlainRegressionEvaluator(InputMatrix inputs, std::vector<double> targets)
        : inputs_(std::move(inputs)), targets_(std::move(targets)) {}

    bool predict(const ExpressionProgram& program, std::vector<double>& out) const override {
        thread_local BatchEvaluator be;
        thread_local EvaluationOutcome eo;
        be(program, inputs_, eo);
        if (!eo.all_valid()) return false;
        out = eo.values;
        return true;
    }

    const std::vector<double>& target() const override { return targets_; }

private:
    InputMatrix inputs_;
    std::vector<double> targets_;
};

}  // namespace symcon
