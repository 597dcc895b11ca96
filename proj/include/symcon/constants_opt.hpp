#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "symcon/nelder_mead.hpp"
#include "symcon/reward.hpp"

namespace symcon {

struct ConstOptSettings {
    int max_evals = 150;            // objective budget per simplex run
    int restarts = 2;               // random restarts, taken only while the fit is poor
    double restart_threshold = 0.05;  // nrmse below this skips remaining restarts
};

/// NRMSE of a program against the evaluator's training rows; +inf when any
/// row is invalid.
inline double nrmse_of_program(const ExpressionProgram& program, const ResidualEvaluator& eval) {
    thread_local std::vector<double> pred;
    if (!eval.predict(program, pred)) return std::numeric_limits<double>::infinity();
    const double denom = std_of(eval.target());
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return rmse_of(pred, eval.target()) / denom;
}

/// Fits the constant slots by derivative-free NRMSE minimization, starting
/// from the current values (1.0 for fresh samples). Returns the input
/// program unchanged when no better constants are found.
inline ExpressionProgram optimize_constants(const ExpressionProgram& program,
                                            const ResidualEvaluator& evaluator,
                                            const ConstOptSettings& settings = {},
                                            std::uint64_t rng_seed = 0) {
    const std::size_t k = program.constant_slots();
    if (k == 0) return program;

    ExpressionProgram work = program;
    auto objective = [&](const std::vector<double>& c) {
        work.constants = c;
        return nrmse_of_program(work, evaluator);
    };

    const double baseline = nrmse_of_program(program, evaluator);
    std::vector<double> best_x = program.constants;
    double best = baseline;

    auto run = nelder_mead(objective, program.constants, settings.max_evals);
    if (run.value < best) {
        best = run.value;
        best_x = run.x;
    }

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int r = 0; r < settings.restarts && best > settings.restart_threshold; ++r) {
        std::vector<double> x0(k);
        for (double& x : x0) x = dist(rng);
        auto res = nelder_mead(objective, x0, settings.max_evals);
        if (res.value < best) {
            best = res.value;
            best_x = res.x;
        }
    }

    if (!(best < baseline)) return program;
    ExpressionProgram out = program;
    out.constants = best_x;
    return out;
}

}  // namespace symcon
