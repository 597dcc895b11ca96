#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "symcon/pipeline.hpp"

namespace symcon {

namespace detail {

inline nlohmann::json fit_to_json(const StepFit& fit) {
    nlohmann::json j;
    j["expression"] = fit.infix;
    j["tokens"] = fit.tokens;
    j["constants"] = fit.constants;
    j["train_reward"] = fit.train_reward;
    j["train_nrmse"] = std::isfinite(fit.train_nrmse) ? fit.train_nrmse : -1.0;
    j["recovered"] = fit.recovered;
    nlohmann::json r2 = nlohmann::json::object();
    for (const auto& [k, v] : fit.r2) r2[k] = std::isfinite(v) ? v : -1e9;
    j["r2"] = r2;
    j["reward_trace"] = fit.reward_trace;
    return j;
}

}  // namespace detail

inline nlohmann::json run_record_json(const DiscoveryResult& result) {
    const RunConfig& c = result.config;
    nlohmann::json j;
    j["config"] = {
        { "benchmark", c.benchmark_id },
        { "data_csv", c.data_csv },
        { "regime", to_string(c.regime) },
        { "temperature", c.temperature },
        { "runs", c.n_runs },
        { "base_seed", c.base_seed },
        { "step1", { { "budget", c.step1.budget },
                     { "batch_size", c.step1.batch_size },
                     { "risk_quantile", c.step1.risk_quantile },
                     { "learning_rate", c.step1.learning_rate },
                     { "entropy_weight", c.step1.entropy_weight },
                     { "max_sequence_length", c.step1.max_sequence_length },
                     { "hidden_size", c.step1.hidden_size },
                     { "policy_training", c.step1.policy_training } } },
        { "step2", { { "budget", c.step2.budget },
                     { "batch_size", c.step2.batch_size },
                     { "risk_quantile", c.step2.risk_quantile },
                     { "learning_rate", c.step2.learning_rate },
                     { "entropy_weight", c.step2.entropy_weight },
                     { "max_sequence_length", c.step2.max_sequence_length },
                     { "hidden_size", c.step2.hidden_size },
                     { "policy_training", c.step2.policy_training } } },
    };
    nlohmann::json runs = nlohmann::json::array();
    int n_recovered1 = 0, n_recovered2 = 0, n_step2 = 0;
    for (const auto& run : result.runs) {
        nlohmann::json rj;
        rj["seed"] = run.seed;
        rj["energy"] = detail::fit_to_json(run.step1);
        rj["energy_shift"] = run.energy.shift;
        if (run.step2) {
            rj["damage"] = detail::fit_to_json(*run.step2);
            ++n_step2;
            if (run.step2->recovered) ++n_recovered2;
        }
        if (run.step1.recovered) ++n_recovered1;
        runs.push_back(rj);
    }
    j["runs"] = runs;
    j["ensemble"] = {
        { "energy_recovery_rate",
          result.runs.empty() ? 0.0 : double(n_recovered1) / double(result.runs.size()) },
        { "damage_recovery_rate", n_step2 == 0 ? 0.0 : double(n_recovered2) / double(n_step2) },
    };
    return j;
}

/// Ensemble prediction table for one slice of the data set: per point the
/// run-mean prediction and the 6-sigma half width (six sample standard
/// deviations across runs; zero for a single run).
struct PlotTable {
    std::vector<double> strain, target, mean, band;
    std::vector<std::string> split;
};

inline PlotTable ensemble_table(const DiscoveryResult& result,
                                const std::vector<LoadingPoint>& points, bool cyclic) {
    PlotTable t;
    const std::size_t n = points.size();
    const std::size_t m = result.runs.size();
    std::vector<std::vector<double>> preds(m, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
        const FittedRun& run = result.runs[r];
        if (cyclic && run.damage) {
            EnergyHistory h = energy_history(points, run.energy);
            for (std::size_t i = 0; i < n; ++i) {
                auto [p, ok] = apply_damage(*run.damage, h.psi[i], h.psi_max[i], h.p0[i],
                                            points[i].t_scaled());
                preds[r][i] = ok && h.valid[i] ? p : std::numeric_limits<double>::quiet_NaN();
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                StressPrediction p =
                    predict_primary_stress(run.energy, result.config.regime, points[i]);
                preds[r][i] = p.valid ? p.P11 : std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        t.strain.push_back(points[i].strain());
        t.target.push_back(points[i].stress);
        t.split.push_back(to_string(points[i].split));
        double mean = 0.0;
        for (std::size_t r = 0; r < m; ++r) mean += preds[r][i];
        mean /= double(m);
        double var = 0.0;
        for (std::size_t r = 0; r < m; ++r) var += (preds[r][i] - mean) * (preds[r][i] - mean);
        const double sd = m > 1 ? std::sqrt(var / double(m - 1)) : 0.0;
        t.mean.push_back(mean);
        t.band.push_back(6.0 * sd);
    }
    return t;
}

inline void write_plot_csv(const PlotTable& t, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "strain,p11_mean,band6sigma,p11_target,split\n";
    for (std::size_t i = 0; i < t.strain.size(); ++i)
        f << format_double(t.strain[i]) << ',' << format_double(t.mean[i]) << ','
          << format_double(t.band[i]) << ',' << format_double(t.target[i]) << ',' << t.split[i]
          << "\n";
}

/// Writes the machine-readable run record, per-case plot tables, and a
/// plain-text expression summary into the output directory.
inline void emit_report(const DiscoveryResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw std::runtime_error("unwritable output directory: " + out_dir);

    {
        std::ofstream f(out_dir + "/run_record.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot open run_record.json for writing");
        f << run_record_json(result).dump(2) << "\n";
    }

    const auto primary = primary_rows(result.data);
    const auto cyclic = cyclic_rows(result.data);
    // slice by loading case and, when present, temperature
    std::map<std::string, std::vector<LoadingPoint>> slices;
    auto slice_key = [](const LoadingPoint& p, const char* kind) {
        std::string key = std::string(kind) + "_" + to_string(p.loading);
        if (p.temperature_c) key += "_T" + format_double(*p.temperature_c);
        return key;
    };
    for (const auto& p : primary) slices[slice_key(p, "primary")].push_back(p);
    for (const auto& p : cyclic) slices[slice_key(p, "cyclic")].push_back(p);
    for (const auto& [key, pts] : slices) {
        const bool cyc = key.rfind("cyclic", 0) == 0;
        write_plot_csv(ensemble_table(result, pts, cyc), out_dir + "/plot_" + key + ".csv");
    }

    std::ofstream f(out_dir + "/summary.txt", std::ios::binary);
    f << "discovered models";
    if (!result.config.benchmark_id.empty()) f << " for benchmark " << result.config.benchmark_id;
    f << "\n\n";
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const FittedRun& run = result.runs[r];
        f << "run " << (r + 1) << " (seed " << run.seed << ")\n";
        f << "  psi   = " << run.step1.infix << "\n";
        f << "  shift = " << format_double(run.energy.shift) << "\n";
        auto r2 = run.step1.r2.find("pooled/all");
        if (r2 != run.step1.r2.end()) f << "  R2(all) = " << format_double(r2->second) << "\n";
        f << "  recovered = " << (run.step1.recovered ? "yes" : "no") << "\n";
        if (run.step2) {
            f << "  eta   = " << run.step2->infix << "\n";
            auto d2 = run.step2->r2.find("pooled/all");
            if (d2 != run.step2->r2.end())
                f << "  R2(cyclic) = " << format_double(d2->second) << "\n";
            f << "  damage recovered = " << (run.step2->recovered ? "yes" : "no") << "\n";
        }
        f << "\n";
    }
}

}  // namespace symcon
