#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "symcon/program.hpp"

namespace symcon {

namespace detail {

struct SimplifyNode {
    Token token;
    double constant = 0.0;  // value when token is a constant placeholder
    std::vector<std::unique_ptr<SimplifyNode>> children;

    bool is_zero_const() const {
        return token.kind == TokenKind::constant_placeholder && constant == 0.0;
    }
};

inline std::unique_ptr<SimplifyNode> parse_subtree(const ExpressionProgram& p,
                                                   std::size_t& cursor, std::size_t& cc) {
    auto node = std::make_unique<SimplifyNode>();
    node->token = p.traversal[cursor++];
    if (node->token.kind == TokenKind::constant_placeholder)
        node->constant = p.constants[cc++];
    for (int i = 0; i < node->token.arity; ++i)
        node->children.push_back(parse_subtree(p, cursor, cc));
    return node;
}

// Prunes exact-zero multiplicative factors and zero additive terms after
// rounding. Intentionally not a general simplifier.
inline std::unique_ptr<SimplifyNode> prune_zeros(std::unique_ptr<SimplifyNode> node) {
    for (auto& c : node->children) c = prune_zeros(std::move(c));

    if (node->token.kind == TokenKind::binary_op) {
        auto& a = node->children[0];
        auto& b = node->children[1];
        switch (node->token.op) {
            case OpCode::mul:
                if (a->is_zero_const() || b->is_zero_const()) {
                    auto zero = std::make_unique<SimplifyNode>();
                    zero->token = make_token("const");
                    zero->constant = 0.0;
                    return zero;
                }
                break;
            case OpCode::div:
                if (a->is_zero_const()) {
                    auto zero = std::make_unique<SimplifyNode>();
                    zero->token = make_token("const");
                    zero->constant = 0.0;
                    return zero;
                }
                break;
            case OpCode::add:
                if (a->is_zero_const()) return std::move(b);
                if (b->is_zero_const()) return std::move(a);
                break;
            case OpCode::sub:
                if (b->is_zero_const()) return std::move(a);
                break;
            default:
                break;
        }
    }
    return node;
}

inline void flatten(const SimplifyNode& node, ExpressionProgram& out) {
    out.traversal.push_back(node.token);
    if (node.token.kind == TokenKind::constant_placeholder)
        out.constants.push_back(node.constant);
    for (const auto& c : node.children) flatten(*c, out);
}

}  // namespace detail

inline double round2(double v) {
    double r = std::round(v * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;  // normalize -0
}

/// Rounds every constant to two decimals, then prunes subtrees multiplied by
/// an exact zero and zero additive terms.
inline ExpressionProgram round_constants_filter(const ExpressionProgram& program) {
    ExpressionProgram rounded = program;
    for (double& c : rounded.constants) c = round2(c);

    std::size_t cursor = 0, cc = 0;
    auto tree = detail::parse_subtree(rounded, cursor, cc);
    tree = detail::prune_zeros(std::move(tree));

    ExpressionProgram out;
    out.input_arity = program.input_arity;
    detail::flatten(*tree, out);
    return out;
}

}  // namespace symcon
