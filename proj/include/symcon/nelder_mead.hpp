#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace symcon {

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
};

/// Downhill simplex minimization. Objective may return +inf for infeasible
/// points. max_evals counts objective calls.
template <typename F>
NelderMeadResult nelder_mead(F&& objective, const std::vector<double>& x0, int max_evals,
                             double tol = 1e-10) {
    const std::size_t n = x0.size();
    NelderMeadResult result;
    result.x = x0;
    if (n == 0) return result;

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> simplex;
    simplex.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = x0;
        v[i] += v[i] != 0.0 ? 0.4 * std::fabs(v[i]) : 0.25;
        simplex.push_back(v);
    }
    int evals = 0;
    auto f = [&](const std::vector<double>& v) {
        ++evals;
        double y = objective(v);
        return std::isfinite(y) ? y : std::numeric_limits<double>::infinity();
    };

    std::vector<double> fx(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) fx[i] = f(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    while (evals < max_evals) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        if (std::isfinite(fx[best]) &&
            fx[worst] - fx[best] <= tol * (std::fabs(fx[best]) + tol)) {
            double diameter = 0.0, scale = 1.0;
            for (std::size_t i = 0; i < n; ++i)
                scale = std::max(scale, std::fabs(simplex[best][i]));
            for (std::size_t k : order)
                for (std::size_t i = 0; i < n; ++i)
                    diameter = std::max(diameter, std::fabs(simplex[k][i] - simplex[best][i]));
            if (diameter <= 1e-8 * scale) break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k : order)
            if (k != worst)
                for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = centroid[i] + t * (centroid[i] - simplex[worst][i]);
            return v;
        };

        auto reflected = blend(alpha);
        double fr = f(reflected);
        if (fr < fx[best]) {
            auto expanded = blend(gamma);
            double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                fx[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                fx[worst] = fr;
            }
        } else if (fr < fx[second_worst]) {
            simplex[worst] = std::move(reflected);
            fx[worst] = fr;
        } else {
            auto contracted = blend(-rho);
            double fc = f(contracted);
            if (fc < fx[worst]) {
                simplex[worst] = std::move(contracted);
                fx[worst] = fc;
            } else {
                for (std::size_t k : order) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[k][i] = simplex[best][i] + sigma * (simplex[k][i] - simplex[best][i]);
                    fx[k] = f(simplex[k]);
                }
            }
        }
        if (evals >= max_evals) break;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
        if (fx[i] < fx[best]) best = i;
    result.x = simplex[best];
    result.value = fx[best];
    result.evaluations = evals;
    return result;
}

}  // namespace symcon
