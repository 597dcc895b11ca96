#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "symcon/token.hpp"

namespace symcon {

namespace detail {

struct AdamBuffer {
    std::vector<double> m, v;
    void init(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
    }
};

}  // namespace detail

/// Single-layer tanh recurrent cell over (parent, sibling) observations with
/// a linear read-out over the token library. The read-out starts at zero so
/// the untrained policy is uniform over whatever the constraint mask allows.
class RnnPolicy {
public:
    RnnPolicy() = default;

    RnnPolicy(int n_tokens, int hidden_size, std::uint64_t seed) { init(n_tokens, hidden_size, seed); }

    void init(int n_tokens, int hidden_size, std::uint64_t seed) {
        n_tokens_ = n_tokens;
        hidden_ = hidden_size;
        in_dim_ = 2 * (n_tokens + 1);  // one-hot(parent) ++ one-hot(sibling), incl. empty
        std::mt19937_64 rng(seed);
        auto uniform_init = [&](std::vector<double>& w, std::size_t n, double limit) {
            w.resize(n);
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (double& x : w) x = dist(rng);
        };
        const double lx = std::sqrt(6.0 / (in_dim_ + hidden_));
        const double lh = std::sqrt(6.0 / (2.0 * hidden_));
        uniform_init(wx_, static_cast<std::size_t>(hidden_) * in_dim_, lx);
        uniform_init(wh_, static_cast<std::size_t>(hidden_) * hidden_, lh);
        bh_.assign(hidden_, 0.0);
        wo_.assign(static_cast<std::size_t>(n_tokens_) * hidden_, 0.0);
        bo_.assign(n_tokens_, 0.0);
        zero_h_.assign(hidden_, 0.0);
        zero_grad();
        adam_wx_.init(wx_.size());
        adam_wh_.init(wh_.size());
        adam_bh_.init(bh_.size());
        adam_wo_.init(wo_.size());
        adam_bo_.init(bo_.size());
        adam_t_ = 0;
    }

    int n_tokens() const { return n_tokens_; }
    int hidden_size() const { return hidden_; }
    int empty_id() const { return n_tokens_; }

    /// h_next = tanh(Wx x + Wh h + bh); logits = Wo h_next + bo.
    /// x is the concatenated pair of one-hots, addressed by column index.
    void step(const std::vector<double>& h_prev, int parent_id, int sibling_id,
              std::vector<double>& h_next, std::vector<double>& logits) const {
        h_next.assign(hidden_, 0.0);
        const int cp = parent_id;
        const int cs = (n_tokens_ + 1) + sibling_id;
        for (int i = 0; i < hidden_; ++i) {
            double acc = bh_[i] + wx_[i * in_dim_ + cp] + wx_[i * in_dim_ + cs];
            const double* whrow = &wh_[static_cast<std::size_t>(i) * hidden_];
            for (int j = 0; j < hidden_; ++j) acc += whrow[j] * h_prev[j];
            h_next[i] = std::tanh(acc);
        }
        logits.assign(n_tokens_, 0.0);
        for (int k = 0; k < n_tokens_; ++k) {
            double acc = bo_[k];
            const double* worow = &wo_[static_cast<std::size_t>(k) * hidden_];
            for (int j = 0; j < hidden_; ++j) acc += worow[j] * h_next[j];
            logits[k] = acc;
        }
    }

    std::vector<double> initial_hidden() const { return std::vector<double>(hidden_, 0.0); }

    void zero_grad() {
        gwx_.assign(static_cast<std::size_t>(hidden_) * in_dim_, 0.0);
        gwh_.assign(static_cast<std::size_t>(hidden_) * hidden_, 0.0);
        gbh_.assign(hidden_, 0.0);
        gwo_.assign(static_cast<std::size_t>(n_tokens_) * hidden_, 0.0);
        gbo_.assign(n_tokens_, 0.0);
    }

    /// Backpropagation through one sampled sequence. hs[t] is the hidden
    /// state AFTER step t (hs has T entries; the initial hidden is zero).
    /// dlogits[t] is dLoss/dlogits at step t.
    void accumulate_sequence_grad(const std::vector<std::pair<int, int>>& observations,
                                  const std::vector<std::vector<double>>& hs,
                                  const std::vector<std::vector<double>>& dlogits) {
        const int T = static_cast<int>(hs.size());
        std::vector<double> dh(hidden_, 0.0), dpre(hidden_, 0.0);
        for (int t = T - 1; t >= 0; --t) {
            const auto& h = hs[t];
            const auto& dz = dlogits[t];
            // read-out
            for (int k = 0; k < n_tokens_; ++k) {
                const double g = dz[k];
                if (g == 0.0) continue;
                gbo_[k] += g;
                double* gw = &gwo_[static_cast<std::size_t>(k) * hidden_];
                const double* wrow = &wo_[static_cast<std::size_t>(k) * hidden_];
                for (int j = 0; j < hidden_; ++j) {
                    gw[j] += g * h[j];
                    dh[j] += g * wrow[j];
                }
            }
            // through tanh
            for (int i = 0; i < hidden_; ++i) dpre[i] = dh[i] * (1.0 - h[i] * h[i]);
            const int cp = observations[t].first;
            const int cs = (n_tokens_ + 1) + observations[t].second;
            const std::vector<double>& h_prev = t > 0 ? hs[t - 1] : zero_hidden();
            for (int i = 0; i < hidden_; ++i) {
                const double g = dpre[i];
                if (g == 0.0) continue;
                gbh_[i] += g;
                gwx_[i * in_dim_ + cp] += g;
                gwx_[i * in_dim_ + cs] += g;
                double* gw = &gwh_[static_cast<std::size_t>(i) * hidden_];
                for (int j = 0; j < hidden_; ++j) gw[j] += g * h_prev[j];
            }
            // dh for the previous step: Wh^T dpre
            std::fill(dh.begin(), dh.end(), 0.0);
            if (t > 0) {
                for (int i = 0; i < hidden_; ++i) {
                    const double g = dpre[i];
                    if (g == 0.0) continue;
                    const double* wrow = &wh_[static_cast<std::size_t>(i) * hidden_];
                    for (int j = 0; j < hidden_; ++j) dh[j] += g * wrow[j];
                }
            }
        }
    }

    void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
        ++adam_t_;
        auto update = [&](std::vector<double>& w, std::vector<double>& g, detail::AdamBuffer& a) {
            const double bc1 = 1.0 - std::pow(beta1, adam_t_);
            const double bc2 = 1.0 - std::pow(beta2, adam_t_);
            for (std::size_t i = 0; i < w.size(); ++i) {
                a.m[i] = beta1 * a.m[i] + (1.0 - beta1) * g[i];
                a.v[i] = beta2 * a.v[i] + (1.0 - beta2) * g[i] * g[i];
                w[i] -= lr * (a.m[i] / bc1) / (std::sqrt(a.v[i] / bc2) + eps);
            }
        };
        update(wx_, gwx_, adam_wx_);
        update(wh_, gwh_, adam_wh_);
        update(bh_, gbh_, adam_bh_);
        update(wo_, gwo_, adam_wo_);
        update(bo_, gbo_, adam_bo_);
    }

private:
    const std::vector<double>& zero_hidden() const { return zero_h_; }

    std::vector<double> zero_h_;
    int n_tokens_ = 0;
    int hidden_ = 0;
    int in_dim_ = 0;
    std::vector<double> wx_, wh_, bh_, wo_, bo_;
    std::vector<double> gwx_, gwh_, gbh_, gwo_, gbo_;
    detail::AdamBuffer adam_wx_, adam_wh_, adam_bh_, adam_wo_, adam_bo_;
    long adam_t_ = 0;
};

/// Numerically safe softmax with a {0,1} mask; masked entries get
/// probability exactly 0.
inline void masked_softmax(const std::vector<double>& logits, const std::vector<char>& allowed,
                           std::vector<double>& probs) {
    probs.assign(logits.size(), 0.0);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (allowed[i] && logits[i] > mx) mx = logits[i];
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!allowed[i]) continue;
        probs[i] = std::exp(logits[i] - mx);
        z += probs[i];
    }
    for (double& p : probs) p /= z;
}

}  // namespace symcon
