#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "symcon/constants_opt.hpp"
#include "symcon/policy.hpp"
#include "symcon/reward.hpp"
#include "symcon/sampler.hpp"
#include "symcon/simplify.hpp"

namespace symcon {

struct BatchDiagnostics {
    std::size_t iteration = 0;
    double best_so_far = 0.0;
    double batch_best = 0.0;
    double reward_threshold = 0.0;
    double mean_length = 0.0;
    std::size_t n_optimized = 0;
};

struct SearchConfig {
    TokenLibrary library;
    int max_sequence_length = 32;
    int min_sequence_length = 4;
    std::size_t sample_budget = 75000;
    int batch_size = 1000;
    double risk_quantile = 0.05;  // epsilon: fraction of the batch kept for the update
    double learning_rate = 5e-4;
    double entropy_weight = 0.01;
    int hidden_size = 32;
    ConstOptSettings const_opt;
    double const_opt_top_fraction = 0.10;
    int const_opt_short_length = 0;  // programs at most this long are always optimized
    int hall_of_fame_size = 10;
    std::uint64_t seed = 0;
    bool policy_training = true;  // false: untrained constrained random search
    int n_threads = 0;            // 0 = hardware concurrency
    std::function<void(const BatchDiagnostics&)> on_batch;  // optional instrumentation

    SamplingConstraints constraints() const {
        SamplingConstraints c;
        c.max_length = max_sequence_length;
        c.min_length = min_sequence_length;
        return c;
    }

    void validate() const {
        if (library.size() == 0) throw std::invalid_argument("search: empty token library");
        if (sample_budget == 0) throw std::invalid_argument("empty search");
        if (sample_budget < static_cast<std::size_t>(batch_size))
            throw std::invalid_argument("search: sample budget smaller than batch size");
        if (!(risk_quantile > 0.0 && risk_quantile < 1.0))
            throw std::invalid_argument("search: risk quantile must lie in (0, 1)");
        if (max_sequence_length < 1 || batch_size < 1)
            throw std::invalid_argument("search: invalid sizes");
    }
};

namespace detail {

template <typename F>
void parallel_for(std::size_t n, int n_threads, F&& body) {
    if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{ 0 };
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    const int spawn = std::min<int>(n_threads, static_cast<int>(n)) - 1;
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::string structure_key(const ExpressionProgram& p) {
    std::string key;
    for (const auto& t : p.traversal) {
        key += t.symbol;
        key += ',';
    }
    return key;
}

// reward desc, then shorter traversal, then earlier discovery
inline bool hof_better(const ScoredProgram& a, const ScoredProgram& b) {
    if (a.reward != b.reward) return a.reward > b.reward;
    if (a.program.size() != b.program.size()) return a.program.size() < b.program.size();
    return a.discovered_at < b.discovered_at;
}

}  // namespace detail

struct TrainStats {
    double reward_threshold = 0.0;
    std::size_t n_selected = 0;
    double mean_reward = 0.0;
    double best_reward = 0.0;
};

/// Risk-seeking policy-gradient update: only programs at or above the
/// (1 - epsilon) reward quantile contribute, weighted by their advantage
/// over the threshold, plus an entropy bonus on the same sub-batch.
inline TrainStats train_step(RnnPolicy& policy, const TokenLibrary& lib,
                             const SamplingConstraints& constraints,
                             const std::vector<ScoredProgram>& batch, double epsilon,
                             double learning_rate, double entropy_weight) {
    if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
    TrainStats stats;

    std::vector<double> rewards;
    rewards.reserve(batch.size());
    for (const auto& s : batch) rewards.push_back(s.reward);
    stats.mean_reward = mean_of(rewards);
    stats.best_reward = *std::max_element(rewards.begin(), rewards.end());

    std::vector<double> sorted = rewards;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(batch.size()))));
    const double threshold = sorted[keep - 1];
    stats.reward_threshold = threshold;

    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (batch[i].reward >= threshold) selected.push_back(i);
    stats.n_selected = selected.size();

    policy.zero_grad();
    const double inv_n = 1.0 / static_cast<double>(selected.size());

    std::vector<double> h_next, logits, probs;
    std::vector<char> allowed;
    for (std::size_t idx : selected) {
        const ScoredProgram& sp = batch[idx];
        const double advantage = sp.reward - threshold;

        TraversalBuilder builder(lib, constraints);
        std::vector<std::pair<int, int>> obs_seq;
        std::vector<std::vector<double>> hs, dlogits;
        std::vector<double> h = policy.initial_hidden();

        for (const Token& tok : sp.program.traversal) {
            const int action = lib.find(tok.symbol);
            const PolicyObservation obs = builder.observation();
            policy.step(h, obs.parent_id, obs.sibling_id, h_next, logits);
            builder.admissible(allowed);
            for (int k = 0; k < lib.size(); ++k)
                logits[k] += constraints.length_prior.bonus(builder.length(), lib[k].arity);
            masked_softmax(logits, allowed, probs);

            std::vector<double> dz(probs.size(), 0.0);
            double entropy = 0.0;
            for (double p : probs)
                if (p > 0.0) entropy -= p * std::log(p);
            for (std::size_t k = 0; k < probs.size(); ++k) {
                const double p = probs[k];
                if (p <= 0.0) continue;
                // d/dz of [-A log p(a)] plus d/dz of [-beta H]
                double g = advantage * (p - (static_cast<int>(k) == action ? 1.0 : 0.0));
                g += entropy_weight * p * (std::log(p) + entropy);
                dz[k] = g * inv_n;
            }
            obs_seq.emplace_back(obs.parent_id, obs.sibling_id);
            hs.push_back(h_next);
            dlogits.push_back(std::move(dz));
            builder.push(action);
            h.swap(h_next);
        }
        policy.accumulate_sequence_grad(obs_seq, hs, dlogits);
    }
    policy.adam_step(learning_rate);
    return stats;
}

struct SearchResult {
    std::vector<ScoredProgram> hall_of_fame;      // post rounding filter, re-scored
    std::vector<ScoredProgram> hall_of_fame_raw;  // as discovered
    std::vector<double> best_reward_trace;        // best-so-far per iteration
    std::size_t samples_used = 0;
};

/// One full search: sample -> score -> optimize constants on the most
/// promising candidates -> update the hall of fame -> policy step, until
/// the sample budget is exhausted.
inline SearchResult run_search(const SearchConfig& config, const ResidualEvaluator& evaluator) {
    config.validate();
    const TokenLibrary& lib = config.library;
    const SamplingConstraints constraints = config.constraints();

    RnnPolicy policy(lib.size(), config.hidden_size, detail::splitmix64(config.seed));
    std::mt19937_64 rng(detail::splitmix64(config.seed ^ 0x5eedull));

    std::map<std::string, ScoredProgram> hof;  // structure key -> best entry
    SearchResult result;
    double best_so_far = 0.0;

    const std::size_t top_k_base = static_cast<std::size_t>(
        std::ceil(config.const_opt_top_fraction * static_cast<double>(config.batch_size)));

    std::size_t samples = 0;
    while (samples < config.sample_budget) {
        const std::size_t n = std::min<std::size_t>(config.batch_size,
                                                    config.sample_budget - samples);
        std::vector<ExpressionProgram> programs(n);
        for (std::size_t i = 0; i < n; ++i)
            programs[i] = program_from_ids(lib, sample_traversal(policy, lib, constraints, rng));

        std::vector<ScoredProgram> scored(n);
        detail::parallel_for(n, config.n_threads, [&](std::size_t i) {
            scored[i] = compute_reward(programs[i], evaluator);
            scored[i].discovered_at = samples + i;
        });

        // constant optimization for the top slice by pre-optimization reward
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return scored[a].reward > scored[b].reward;
        });
        std::vector<std::size_t> to_optimize;
        std::vector<char> picked(n, 0);
        for (std::size_t r = 0; r < order.size() && to_optimize.size() < top_k_base; ++r) {
            const std::size_t i = order[r];
            if (scored[i].program.constant_slots() > 0 && scored[i].reward > 0.0) {
                to_optimize.push_back(i);
                picked[i] = 1;
            }
        }
        if (config.const_opt_short_length > 0) {
            for (std::size_t i = 0; i < n; ++i)
                if (!picked[i] && scored[i].reward > 0.0 &&
                    scored[i].program.constant_slots() > 0 &&
                    scored[i].program.size() <=
                        static_cast<std::size_t>(config.const_opt_short_length))
                    to_optimize.push_back(i);
        }
        detail::parallel_for(to_optimize.size(), config.n_threads, [&](std::size_t t) {
            const std::size_t i = to_optimize[t];
            const std::uint64_t opt_seed =
                detail::splitmix64(config.seed ^ (scored[i].discovered_at + 1));
            ExpressionProgram better =
                optimize_constants(scored[i].program, evaluator, config.const_opt, opt_seed);
            ScoredProgram rescored = compute_reward(better, evaluator);
            rescored.discovered_at = scored[i].discovered_at;
            if (rescored.reward >= scored[i].reward) scored[i] = std::move(rescored);
        });

        for (const auto& s : scored) {
            best_so_far = std::max(best_so_far, s.reward);
            if (s.reward <= 0.0) continue;
            auto key = detail::structure_key(s.program);
            auto it = hof.find(key);
            if (it == hof.end()) {
                hof.emplace(std::move(key), s);
            } else if (detail::hof_better(s, it->second)) {
                it->second = s;
            }
        }
        // keep the candidate buffer bounded; final ranking happens post-filter
        if (hof.size() > 600) {
            std::vector<std::pair<std::string, ScoredProgram>> all(hof.begin(), hof.end());
            std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
                return detail::hof_better(a.second, b.second);
            });
            all.resize(300);
            hof = std::map<std::string, ScoredProgram>(all.begin(), all.end());
        }

        result.best_reward_trace.push_back(best_so_far);
        samples += n;

        TrainStats stats;
        if (config.policy_training)
            stats = train_step(policy, lib, constraints, scored, config.risk_quantile,
                               config.learning_rate, config.entropy_weight);
        if (config.on_batch) {
            BatchDiagnostics diag;
            diag.iteration = result.best_reward_trace.size() - 1;
            diag.best_so_far = best_so_far;
            diag.batch_best = 0.0;
            for (const auto& s : scored) diag.batch_best = std::max(diag.batch_best, s.reward);
            diag.reward_threshold = stats.reward_threshold;
            double len = 0.0;
            for (const auto& s : scored) len += static_cast<double>(s.program.size());
            diag.mean_length = len / static_cast<double>(n);
            diag.n_optimized = to_optimize.size();
            config.on_batch(diag);
        }
    }
    result.samples_used = samples;

    std::vector<ScoredProgram> raw(hof.size());
    std::size_t i = 0;
    for (auto& [key, sp] : hof) raw[i++] = sp;
    std::sort(raw.begin(), raw.end(), detail::hof_better);

    // final evaluation applies the decimal-rounding filter and re-scores;
    // the hall of fame ranks by the filtered reward
    std::vector<ScoredProgram> filtered(raw.size());
    detail::parallel_for(raw.size(), config.n_threads, [&](std::size_t k) {
        ExpressionProgram f = round_constants_filter(raw[k].program);
        ScoredProgram rescored = compute_reward(f, evaluator);
        rescored.discovered_at = raw[k].discovered_at;
        filtered[k] = std::move(rescored);
    });
    std::vector<std::size_t> order(raw.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detail::hof_better(filtered[a], filtered[b]);
    });
    const std::size_t keep = std::min<std::size_t>(order.size(), config.hall_of_fame_size);
    for (std::size_t k = 0; k < keep; ++k) {
        result.hall_of_fame.push_back(filtered[order[k]]);
        result.hall_of_fame_raw.push_back(raw[order[k]]);
    }
    return result;
}

}  // namespace symcon
