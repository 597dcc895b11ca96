#pragma once

#include <random>
#include <vector>

#include "symcon/policy.hpp"
#include "symcon/program.hpp"
#include "symcon/token.hpp"

namespace symcon {

/// Parent/sibling observation for the position about to be sampled.
/// Ids index the token library; `empty` is library-size.
struct PolicyObservation {
    int parent_id = -1;
    int sibling_id = -1;
    int position = 0;
};

/// Soft prior over traversal length added to the logits: terminating before
/// `loc` tokens and growing past it are both discouraged quadratically.
struct SoftLengthPrior {
    bool enabled = true;
    double loc = 10.0;
    double scale = 4.0;
    bool discourage_early_termination = false;  // the min-length mask already covers this

    double bonus(int position, int arity) const {
        if (!enabled) return 0.0;
        const double d = static_cast<double>(position) - loc;
        if (arity == 0 && d < 0.0)
            return discourage_early_termination ? -(d * d) / (2.0 * scale * scale) : 0.0;
        if (arity > 0 && d > 0.0) return -(d * d) / (2.0 * scale * scale);
        return 0.0;
    }
};

struct SamplingConstraints {
    int max_length = 40;
    int min_length = 4;
    bool forbid_inverse_pairs = true;   // no exp(log(.)) or log(exp(.)) nesting
    bool forbid_const_pairs = true;     // binary op with two constant children
    bool forbid_const_unary = true;     // unary op applied directly to a constant
    SoftLengthPrior length_prior;
};

/// Incremental pre-order builder. Tracks the innermost incomplete operator
/// to produce observations and constraint masks while a traversal grows.
class TraversalBuilder {
public:
    TraversalBuilder(const TokenLibrary& lib, SamplingConstraints constraints)
        : lib_(&lib), cfg_(constraints) {
        open_slots_ = 1;
    }

    bool complete() const { return open_slots_ == 0; }
    int length() const { return static_cast<int>(tokens_.size()); }
    const std::vector<int>& token_ids() const { return tokens_; }

    PolicyObservation observation() const {
        PolicyObservation obs;
        obs.position = length();
        const int empty = lib_->size();
        if (stack_.empty()) {
            obs.parent_id = empty;
            obs.sibling_id = empty;
        } else {
            const Frame& top = stack_.back();
            obs.parent_id = top.token_id;
            obs.sibling_id = top.filled >= 1 ? top.first_child_root : empty;
        }
        return obs;
    }

    /// Mask of admissible next tokens; never empties the terminal set.
    void admissible(std::vector<char>& allowed) const {
        const int V = lib_->size();
        allowed.assign(V, 1);
        const int len = length();
        const PolicyObservation obs = observation();
        const bool parent_present = obs.parent_id < V;
        const Token* parent = parent_present ? &(*lib_)[obs.parent_id] : nullptr;

        for (int k = 0; k < V; ++k) {
            const Token& t = (*lib_)[k];
            // completing every open slot with terminals takes (open_slots - 1
            // + arity) more tokens after this one
            if (len + 1 + (open_slots_ - 1 + t.arity) > cfg_.max_length) {
                allowed[k] = 0;
                continue;
            }
            if (t.arity == 0 && len + open_slots_ < cfg_.min_length) {
                allowed[k] = 0;
                continue;
            }
            if (cfg_.forbid_inverse_pairs && parent && t.kind == TokenKind::unary_op) {
                if ((parent->op == OpCode::exp && t.op == OpCode::log) ||
                    (parent->op == OpCode::log && t.op == OpCode::exp)) {
                    allowed[k] = 0;
                    continue;
                }
            }
            if (t.kind == TokenKind::constant_placeholder && parent) {
                if (cfg_.forbid_const_unary && parent->arity == 1) {
                    allowed[k] = 0;
                    continue;
                }
                if (cfg_.forbid_const_pairs && parent->arity == 2 && obs.sibling_id < V &&
                    (*lib_)[obs.sibling_id].kind == TokenKind::constant_placeholder) {
                    allowed[k] = 0;
                    continue;
                }
            }
        }
        // The min-length mask may not conflict with the length budget: if it
        // stripped every admissible token, re-admit terminals.
        bool any = false;
        for (char a : allowed)
            if (a) { any = true; break; }
        if (!any)
            for (int k = 0; k < V; ++k)
                if ((*lib_)[k].arity == 0) allowed[k] = 1;
    }

    void push(int token_id) {
        const Token& t = (*lib_)[token_id];
        if (!stack_.empty()) {
            Frame& top = stack_.back();
            if (top.filled == 0 && top.first_child_root < 0) top.first_child_root = token_id;
        }
        tokens_.push_back(token_id);
        open_slots_ += t.arity - 1;
        if (t.arity > 0) {
            stack_.push_back(Frame{ token_id, t.arity, 0, -1 });
        } else {
            // a terminal completes a subtree; propagate completions upward
            while (!stack_.empty()) {
                Frame& top = stack_.back();
                ++top.filled;
                if (top.filled < top.arity) break;
                stack_.pop_back();
            }
        }
    }

private:
    struct Frame {
        int token_id;
        int arity;
        int filled;
        int first_child_root;
    };

    const TokenLibrary* lib_;
    SamplingConstraints cfg_;
    std::vector<int> tokens_;
    std::vector<Frame> stack_;
    int open_slots_ = 1;
};

inline ExpressionProgram program_from_ids(const TokenLibrary& lib, const std::vector<int>& ids) {
    ExpressionProgram p;
    p.traversal.reserve(ids.size());
    for (int id : ids) p.traversal.push_back(lib[id]);
    p.input_arity = lib.input_arity();
    p.constants.assign(p.constant_slots(), 1.0);
    return p;
}

/// Samples one complete constrained traversal from the policy.
inline std::vector<int> sample_traversal(const RnnPolicy& policy, const TokenLibrary& lib,
                                         const SamplingConstraints& cfg, std::mt19937_64& rng) {
    TraversalBuilder builder(lib, cfg);
    std::vector<double> h = policy.initial_hidden(), h_next, logits, probs;
    std::vector<char> allowed;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (!builder.complete()) {
        const PolicyObservation obs = builder.observation();
        policy.step(h, obs.parent_id, obs.sibling_id, h_next, logits);
        builder.admissible(allowed);
        for (int k = 0; k < lib.size(); ++k)
            logits[k] += cfg.length_prior.bonus(builder.length(), lib[k].arity);
        masked_softmax(logits, allowed, probs);
        double u = unit(rng), acc = 0.0;
        int pick = -1;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            acc += probs[k];
            if (u <= acc) { pick = static_cast<int>(k); break; }
        }
        if (pick < 0) {  // numerical remainder; take the last admissible token
            for (int k = static_cast<int>(probs.size()) - 1; k >= 0; --k)
                if (allowed[k]) { pick = k; break; }
        }
        builder.push(pick);
        h.swap(h_next);
    }
    return builder.token_ids();
}

}  // namespace symcon
