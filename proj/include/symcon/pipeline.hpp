#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcon/csv.hpp"
#include "symcon/datagen.hpp"
#include "symcon/evaluators.hpp"
#include "symcon/infix.hpp"
#include "symcon/search.hpp"

namespace symcon {

enum class Regime { incompressible, nearly_incompressible };

inline const char* to_string(Regime r) {
    return r == Regime::incompressible ? "incompressible" : "nearly-incompressible";
}

/// Search knobs for one pipeline step.
struct StepParams {
    std::size_t budget = 75000;
    int batch_size = 1000;
    double risk_quantile = 0.05;
    double learning_rate = 5e-4;
    double entropy_weight = 0.01;
    int max_sequence_length = 32;
    int hidden_size = 32;
    ConstOptSettings const_opt;
    double const_opt_top_fraction = 0.10;
    bool policy_training = true;
};

struct RunConfig {
    std::string benchmark_id;  // one of known_benchmarks(), or empty with data_csv set
    std::string data_csv;
    Regime regime = Regime::incompressible;
    bool temperature = false;
    int n_runs = 5;
    std::uint64_t base_seed = 42;
    StepParams step1, step2;
    std::string out_dir = "out";
    int n_threads = 0;

    void validate() const {
        if (n_runs < 1) throw std::invalid_argument("config: need at least one run");
        if (benchmark_id.empty() && data_csv.empty())
            throw std::invalid_argument("config: either a benchmark id or a data csv is required");
        if (!benchmark_id.empty() && !data_csv.empty())
            throw std::invalid_argument("config: benchmark id and data csv are mutually exclusive");
    }
};

/// Fit quality and identity of one discovered expression.
struct StepFit {
    std::string infix;
    std::vector<std::string> tokens;
    std::vector<double> constants;
    double train_reward = 0.0;
    double train_nrmse = std::numeric_limits<double>::infinity();
    std::map<std::string, double> r2;  // "<case>/<split>" and "pooled/<split>"
    bool recovered = false;
    std::vector<double> reward_trace;
};

struct FittedRun {
    std::uint64_t seed = 0;
    EnergyModel energy;
    StepFit step1;
    std::optional<DamageModel> damage;
    std::optional<StepFit> step2;
    double runtime_seconds = 0.0;
};

struct DiscoveryResult {
    RunConfig config;
    std::vector<LoadingPoint> data;  // primary rows are cycle 0 / branch primary
    std::vector<FittedRun> runs;
};

// ---------------------------------------------------------------------------
// Data assembly
// ---------------------------------------------------------------------------

inline std::vector<LoadingPoint> primary_rows(const std::vector<LoadingPoint>& data) {
    std::vector<LoadingPoint> out;
    for (const auto& p : data)
        if (p.cycle == 0 && p.branch == Branch::primary) out.push_back(p);
    return out;
}

inline std::vector<LoadingPoint> cyclic_rows(const std::vector<LoadingPoint>& data) {
    std::vector<LoadingPoint> out;
    for (const auto& p : data)
        if (p.cycle > 0) out.push_back(p);
    return out;
}

inline std::vector<LoadingPoint> select_split(const std::vector<LoadingPoint>& data,
                                              SplitTag tag) {
    std::vector<LoadingPoint> out;
    for (const auto& p : data)
        if (p.split == tag) out.push_back(p);
    return out;
}

/// Split protocol for csv data without temperature metadata: benchmark-style
/// 80/20 on the primary band; unloading branches of cycles inside the band
/// carry the cyclic split, larger cycles are extrapolation data.
inline void assign_default_splits(std::vector<LoadingPoint>& points, double fraction,
                                  std::uint64_t seed) {
    std::map<std::pair<int, int>, double> cycle_peak;  // (case, cycle) -> max strain
    for (const auto& p : points)
        if (p.cycle > 0) {
            auto key = std::make_pair(static_cast<int>(p.loading), p.cycle);
            auto it = cycle_peak.find(key);
            if (it == cycle_peak.end() || p.strain() > it->second) cycle_peak[key] = p.strain();
        }
    for (auto& p : points) {
        if (p.cycle == 0) {
            p.split = SplitTag::train;  // re-tagged by split_train_test below
        } else {
            const double peak = cycle_peak[{ static_cast<int>(p.loading), p.cycle }];
            if (peak > 1.0 + 1e-12)
                p.split = SplitTag::test_extrap;
            else
                p.split = p.branch == Branch::unloading ? SplitTag::train : SplitTag::test_interp;
        }
    }
    // primary band split (cyclic training rows are below the band by construction)
    std::vector<std::size_t> primary_idx;
    std::vector<LoadingPoint> primary;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].cycle == 0) {
            primary_idx.push_back(i);
            primary.push_back(points[i]);
        }
    split_train_test(primary, fraction, seed);
    for (std::size_t k = 0; k < primary_idx.size(); ++k)
        points[primary_idx[k]].split = primary[k].split;
    // cyclic 80/20 over the train-tagged unloading rows, per case
    std::map<int, std::vector<std::size_t>> pool;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].cycle > 0 && points[i].split == SplitTag::train)
            pool[static_cast<int>(points[i].loading)].push_back(i);
    for (auto& [case_idx, rows] : pool) {
        std::mt19937_64 rng(seed ^ (0x94d049bb133111ebull * (case_idx + 1)));
        std::shuffle(rows.begin(), rows.end(), rng);
        const std::size_t n_train =
            static_cast<std::size_t>(std::floor(fraction * rows.size()));
        for (std::size_t k = n_train; k < rows.size(); ++k)
            points[rows[k]].split = SplitTag::test_interp;
    }
}

/// Builds the working data set for a configuration: synthetic benchmark,
/// temperature stand-in, or user csv.
inline std::vector<LoadingPoint> assemble_data(const RunConfig& config) {
    if (!config.data_csv.empty()) {
        if (config.temperature) return load_experimental_csv(config.data_csv);
        auto points = read_loading_csv(config.data_csv);
        assign_default_splits(points, 0.8, config.base_seed);
        return points;
    }
    if (config.benchmark_id == "temperature-standin") return generate_temperature_standin();
    BenchmarkSpec spec = benchmark_spec(config.benchmark_id);
    auto points = generate_primary(spec, config.base_seed);
    if (spec.damage) {
        auto cyc = generate_cyclic(spec, config.base_seed);
        points.insert(points.end(), cyc.begin(), cyc.end());
    }
    return points;
}

// ---------------------------------------------------------------------------
// Prediction and scoring
// ---------------------------------------------------------------------------

inline StressPrediction predict_primary_stress(const EnergyModel& energy, Regime regime,
                                               const LoadingPoint& pt) {
    if (regime == Regime::nearly_incompressible)
        return pk1_nearly_incompressible(energy, pt.loading, pt.stretch);
    DeformationState s = deformation_state(pt.loading, pt.stretch);
    s.temperature_scaled = pt.t_scaled();
    return pk1_incompressible(energy, s);
}

/// R-squared per "<case>/<split>" group plus pooled rows per split and
/// over everything. Groups containing an invalid prediction score -inf.
inline std::map<std::string, double> r2_by_group(const std::vector<LoadingPoint>& points,
                                                 const std::vector<double>& pred,
                                                 const std::vector<char>& valid) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string c = to_string(points[i].loading);
        const std::string s = to_string(points[i].split);
        groups[c + "/" + s].push_back(i);
        groups["pooled/" + s].push_back(i);
        groups["pooled/all"].push_back(i);
    }
    std::map<std::string, double> out;
    for (const auto& [key, rows] : groups) {
        bool ok = true;
        std::vector<double> p, y;
        p.reserve(rows.size());
        y.reserve(rows.size());
        for (std::size_t i : rows) {
            if (!valid[i]) { ok = false; break; }
            p.push_back(pred[i]);
            y.push_back(points[i].stress);
        }
        out[key] = ok ? r_squared(p, y) : -std::numeric_limits<double>::infinity();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Recovery checks
// ---------------------------------------------------------------------------

/// Axis-aligned probe box over the model inputs.
struct ProbeRegion {
    std::vector<std::pair<double, double>> bounds;
};

/// Gradient field of the target material, in model-input order.
using GradientFn = std::function<std::vector<double>(const std::vector<double>&)>;

/// TRUE iff the candidate's finite-difference gradient field matches the
/// target's on a dense probe grid, to 1e-3 relative. Derivative comparison
/// makes additive constants irrelevant.
inline bool check_recovery(const EnergyModel& candidate, const GradientFn& target_gradients,
                           const ProbeRegion& region, double rel_tol = 1e-3) {
    const std::size_t dims = region.bounds.size();
    if (candidate.uses_T() || candidate.layout.size() != dims) return false;
    const int per_axis = dims <= 2 ? 20 : 8;
    std::vector<int> idx(dims, 0);
    std::vector<double> x(dims, 0.0);
    for (;;) {
        for (std::size_t d = 0; d < dims; ++d) {
            const auto [lo, hi] = region.bounds[d];
            x[d] = lo + (hi - lo) * idx[d] / double(per_axis - 1);
        }
        EnergyDerivatives fd = fd_energy_derivatives_at(candidate, x.data());
        if (!fd.valid) return false;
        std::vector<double> got;
        for (std::size_t d = 0; d < candidate.layout.size(); ++d) {
            switch (candidate.layout[d]) {
                case EnergyInput::Iso1: got.push_back(fd.d_iso1); break;
                case EnergyInput::Iso2: got.push_back(fd.d_iso2); break;
                case EnergyInput::J: got.push_back(fd.d_J); break;
                case EnergyInput::T: break;
            }
        }
        const std::vector<double> want = target_gradients(x);
        if (got.size() != want.size()) return false;
        for (std::size_t d = 0; d < want.size(); ++d) {
            const double err = std::fabs(got[d] - want[d]) /
                               std::max(std::fabs(want[d]), 1e-6);
            if (!(err <= rel_tol)) return false;
        }
        std::size_t d = 0;
        while (d < dims && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == dims) break;
    }
    return true;
}

/// Probe region spanned by the training rows' invariants (incompressible
/// kinematics; the nearly incompressible J band comes from the oracle).
inline ProbeRegion training_probe_region(const std::vector<LoadingPoint>& train_points,
                                         const EnergyModel& model,
                                         const BenchmarkSpec* spec = nullptr) {
    ProbeRegion region;
    const bool vol = model.uses_J();
    double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300, loJ = 1e300, hiJ = -1e300;
    for (const auto& pt : train_points) {
        DeformationState s;
        if (vol && spec && spec->volumetric) {
            SplitMaterial mat{ spec->gmr, *spec->volumetric };
            auto lt = solve_lateral_stretch(mat, pt.loading, pt.stretch);
            s = compressible_state(pt.loading, pt.stretch,
                                   lt.value_or(incompressible_lateral(pt.loading, pt.stretch)));
        } else {
            s = deformation_state(pt.loading, pt.stretch);
        }
        const double i1 = vol ? s.I1_bar : s.I1;
        const double i2 = vol ? s.I2_bar : s.I2;
        lo1 = std::min(lo1, i1); hi1 = std::max(hi1, i1);
        lo2 = std::min(lo2, i2); hi2 = std::max(hi2, i2);
        loJ = std::min(loJ, s.J); hiJ = std::max(hiJ, s.J);
    }
    for (auto input : model.layout) {
        switch (input) {
            case EnergyInput::Iso1: region.bounds.emplace_back(lo1, hi1); break;
            case EnergyInput::Iso2: region.bounds.emplace_back(lo2, hi2); break;
            case EnergyInput::J:
                if (hiJ - loJ < 1e-6) { loJ -= 5e-4; hiJ += 5e-4; }
                region.bounds.emplace_back(loJ, hiJ);
                break;
            case EnergyInput::T: break;
        }
    }
    return region;
}

/// Structural recovery of the damage family: the fitted eta must use the
/// error function, reproduce an undamaged primary curve
/// (|eta(psi_max, psi_max) - 1| <= 0.02 over the training energy range)
/// and fit the training branches tightly.
inline bool damage_recovery_check(const DamageModel& damage, const EnergyHistory& history,
                                  const std::map<std::string, double>& r2) {
    bool has_erf = false;
    for (const auto& t : damage.program.traversal)
        if (t.op == OpCode::erf) { has_erf = true; break; }
    if (!has_erf) return false;

    double psi_hi = 0.0;
    for (std::size_t i = 0; i < history.psi_max.size(); ++i)
        if (history.valid[i]) psi_hi = std::max(psi_hi, history.psi_max[i]);
    for (int k = 0; k < 20; ++k) {
        const double psi = psi_hi * k / 19.0;
        auto [eta, ok] = damage_value(damage, psi, psi, std::nullopt);
        if (!ok || std::fabs(eta - 1.0) > 0.02) return false;
    }
    auto it = r2.find("pooled/train");
    return it != r2.end() && it->second >= 0.99;
}

// ---------------------------------------------------------------------------
// The two identification steps
// ---------------------------------------------------------------------------

inline std::vector<std::string> energy_variable_names(const EnergyModel& m) {
    std::vector<std::string> names;
    for (auto input : m.layout) {
        switch (input) {
            case EnergyInput::Iso1: names.push_back(m.uses_J() ? "I1b" : "I1"); break;
            case EnergyInput::Iso2: names.push_back(m.uses_J() ? "I2b" : "I2"); break;
            case EnergyInput::J: names.push_back("J"); break;
            case EnergyInput::T: names.push_back("T"); break;
        }
    }
    return names;
}

inline SearchConfig make_search_config(const StepParams& params, const TokenLibrary& lib,
                                       std::uint64_t seed, int n_threads) {
    SearchConfig cfg;
    cfg.library = lib;
    cfg.sample_budget = params.budget;
    cfg.batch_size = params.batch_size;
    cfg.risk_quantile = params.risk_quantile;
    cfg.learning_rate = params.learning_rate;
    cfg.entropy_weight = params.entropy_weight;
    cfg.max_sequence_length = params.max_sequence_length;
    cfg.hidden_size = params.hidden_size;
    cfg.const_opt = params.const_opt;
    cfg.const_opt_top_fraction = params.const_opt_top_fraction;
    cfg.policy_training = params.policy_training;
    cfg.seed = seed;
    cfg.n_threads = n_threads;
    return cfg;
}

/// Picks the best hall-of-fame entry that survives the rounding filter with
/// a usable reward and an evaluable reference state.
inline std::pair<ScoredProgram, EnergyModel> pick_energy_model(
    const SearchResult& result, const std::vector<EnergyInput>& layout,
    std::optional<double> ref_temperature) {
    for (const auto& sp : result.hall_of_fame) {
        if (!(sp.reward > 0.0)) continue;
        EnergyModel m;
        m.program = sp.program;
        m.layout = layout;
        try {
            m = shift_energy(m, ref_temperature);
        } catch (const std::exception&) {
            continue;
        }
        return { sp, m };
    }
    throw std::runtime_error("search produced an all-invalid hall of fame");
}

/// Step 1: identify the strain energy from primary-loading data. One search
/// per seed; the residual couples finite-difference derivatives to the
/// appropriate stress expression over all loading cases at once.
inline void run_step1(const RunConfig& config, const std::vector<LoadingPoint>& data,
                      std::vector<FittedRun>& runs) {
    const auto primary = primary_rows(data);
    const auto train = select_split(primary, SplitTag::train);
    if (train.empty()) throw std::runtime_error("step 1: empty training data");

    std::vector<EnergyInput> layout;
    if (config.regime == Regime::nearly_incompressible)
        layout = { EnergyInput::Iso1, EnergyInput::Iso2, EnergyInput::J };
    else
        layout = { EnergyInput::Iso1, EnergyInput::Iso2 };
    if (config.temperature) layout.push_back(EnergyInput::T);

    std::unique_ptr<ResidualEvaluator> evaluator;
    if (config.regime == Regime::nearly_incompressible)
        evaluator = std::make_unique<NearlyIncompressibleStressEvaluator>(train);
    else
        evaluator = std::make_unique<IncompressibleStressEvaluator>(train, config.temperature);

    TokenLibrary lib = step1_library(static_cast<int>(layout.size()));

    const BenchmarkSpec* spec_ptr = nullptr;
    BenchmarkSpec spec;
    if (!config.benchmark_id.empty() && config.benchmark_id != "temperature-standin") {
        spec = benchmark_spec(config.benchmark_id);
        spec_ptr = &spec;
    }

    for (int r = 0; r < config.n_runs; ++r) {
        FittedRun& run = runs[r];
        run.seed = config.base_seed + static_cast<std::uint64_t>(r);
        const auto t0 = std::chrono::steady_clock::now();

        SearchConfig cfg = make_search_config(config.step1, lib, run.seed, config.n_threads);
        SearchResult result = run_search(cfg, *evaluator);

        std::optional<double> ref_t;
        if (config.temperature) ref_t = train.front().t_scaled();
        auto [scored, model] = pick_energy_model(result, layout, ref_t);
        run.energy = model;

        StepFit& fit = run.step1;
        fit.infix = to_infix(scored.program, energy_variable_names(model));
        for (const auto& t : scored.program.traversal) fit.tokens.push_back(t.symbol);
        fit.constants = scored.program.constants;
        fit.train_reward = scored.reward;
        fit.train_nrmse = scored.nrmse;
        fit.reward_trace = result.best_reward_trace;

        std::vector<double> pred(primary.size(), 0.0);
        std::vector<char> valid(primary.size(), 1);
        for (std::size_t i = 0; i < primary.size(); ++i) {
            StressPrediction p = predict_primary_stress(model, config.regime, primary[i]);
            pred[i] = p.P11;
            valid[i] = p.valid ? 1 : 0;
        }
        fit.r2 = r2_by_group(primary, pred, valid);

        if (spec_ptr) {
            ProbeRegion region = training_probe_region(train, model, spec_ptr);
            const BenchmarkSpec& sp = *spec_ptr;
            const bool with_J = model.uses_J();
            GradientFn target = [&sp, with_J](const std::vector<double>& x) {
                std::vector<double> g = { sp.gmr.dpsi_d1(x[0]), sp.gmr.dpsi_d2(x[1]) };
                if (with_J && sp.volumetric) g.push_back(sp.volumetric->dpsi_dJ(x[2]));
                return g;
            };
            fit.recovered = check_recovery(model, target, region);
        }
        run.runtime_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
}

/// Step 2: identify the damage function on cyclic data, with (psi, psi_max)
/// histories computed from each run's step-1 energy.
inline void run_step2(const RunConfig& config, const std::vector<LoadingPoint>& data,
                      std::vector<FittedRun>& runs) {
    const auto cyclic = cyclic_rows(data);
    if (cyclic.empty()) throw std::runtime_error("step 2: missing cyclic data");
    if (config.regime != Regime::incompressible)
        throw std::runtime_error("step 2: damage identification expects incompressible data");

    std::vector<DamageInput> layout = { DamageInput::Psi, DamageInput::PsiMax };
    if (config.temperature) layout.push_back(DamageInput::T);
    TokenLibrary lib = step2_library(static_cast<int>(layout.size()));

    for (int r = 0; r < config.n_runs; ++r) {
        FittedRun& run = runs[r];
        const auto t0 = std::chrono::steady_clock::now();

        EnergyHistory history = energy_history(cyclic, run.energy);
        std::vector<LoadingPoint> train;
        EnergyHistory train_hist;
        for (std::size_t i = 0; i < cyclic.size(); ++i) {
            if (cyclic[i].split != SplitTag::train) continue;
            train.push_back(cyclic[i]);
            train_hist.psi.push_back(history.psi[i]);
            train_hist.psi_max.push_back(history.psi_max[i]);
            train_hist.p0.push_back(history.p0[i]);
            train_hist.valid.push_back(history.valid[i]);
        }
        if (train.empty()) throw std::runtime_error("step 2: empty cyclic training data");

        DamageStressEvaluator evaluator(train, train_hist, config.temperature);
        SearchConfig cfg = make_search_config(config.step2, lib,
                                              detail::splitmix64(run.seed ^ 0x7472u),
                                              config.n_threads);
        SearchResult result = run_search(cfg, evaluator);

        const ScoredProgram* best = nullptr;
        for (const auto& sp : result.hall_of_fame)
            if (sp.reward > 0.0) { best = &sp; break; }
        if (!best) throw std::runtime_error("step 2: all-invalid hall of fame");

        DamageModel dmg;
        dmg.program = best->program;
        dmg.layout = layout;
        run.damage = dmg;

        StepFit fit;
        std::vector<std::string> names = { "psi", "psi_max" };
        if (config.temperature) names.push_back("T");
        fit.infix = to_infix(best->program, names);
        for (const auto& t : best->program.traversal) fit.tokens.push_back(t.symbol);
        fit.constants = best->program.constants;
        fit.train_reward = best->reward;
        fit.train_nrmse = best->nrmse;
        fit.reward_trace = result.best_reward_trace;

        std::vector<double> pred(cyclic.size(), 0.0);
        std::vector<char> valid(cyclic.size(), 1);
        for (std::size_t i = 0; i < cyclic.size(); ++i) {
            if (!history.valid[i]) { valid[i] = 0; continue; }
            auto [p, ok] = apply_damage(dmg, history.psi[i], history.psi_max[i], history.p0[i],
                                        cyclic[i].t_scaled());
            pred[i] = p;
            valid[i] = ok ? 1 : 0;
        }
        fit.r2 = r2_by_group(cyclic, pred, valid);
        fit.recovered = damage_recovery_check(dmg, history, fit.r2);
        run.step2 = fit;
        run.runtime_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
}

/// Full two-step discovery over a configuration.
inline DiscoveryResult discover(const RunConfig& config) {
    config.validate();
    DiscoveryResult result;
    result.config = config;
    result.data = assemble_data(config);
    result.runs.assign(config.n_runs, FittedRun{});
    run_step1(config, result.data, result.runs);
    if (!cyclic_rows(result.data).empty()) run_step2(config, result.data, result.runs);
    return result;
}

}  // namespace symcon
