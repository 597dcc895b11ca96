#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "symcon/token.hpp"

namespace symcon {

constexpr std::size_t kDefaultMaxTraversalLength = 64;

struct TraversalCheck {
    bool ok = false;
    std::string diagnostic;
};

/// Checks that a token sequence is a complete pre-order encoding of an
/// expression tree: the running arity balance starts at 1, each token adds
/// (arity - 1), and the balance reaches 0 exactly at the last token.
inline TraversalCheck validate_traversal(const std::vector<Token>& traversal) {
    if (traversal.empty()) return { false, "empty traversal" };
    long balance = 1;
    for (std::size_t i = 0; i < traversal.size(); ++i) {
        balance += traversal[i].arity - 1;
        if (balance == 0 && i + 1 < traversal.size())
            return { false, "traversal complete at position " + std::to_string(i) +
                                " with trailing tokens" };
        if (balance < 0)
            return { false, "negative arity balance at position " + std::to_string(i) };
    }
    if (balance != 0) return { false, "incomplete at end" };
    return { true, "" };
}

/// A symbolic expression encoded as a pre-order token traversal plus one
/// constant value per constant-placeholder occurrence. Immutable in spirit:
/// all search operations copy rather than mutate shared programs.
struct ExpressionProgram {
    std::vector<Token> traversal;
    std::vector<double> constants;
    int input_arity = 0;

    std::size_t size() const { return traversal.size(); }

    std::size_t constant_slots() const {
        std::size_t n = 0;
        for (const auto& t : traversal)
            if (t.kind == TokenKind::constant_placeholder) ++n;
        return n;
    }

    bool valid() const {
        return validate_traversal(traversal).ok && constants.size() == constant_slots();
    }
};

/// Builds a program from token symbols; constants are matched to placeholder
/// occurrences in traversal order. Used in tests and fixtures.
inline ExpressionProgram make_program(const std::vector<std::string>& symbols,
                                      const std::vector<double>& constants = {},
                                      int input_arity = -1) {
    ExpressionProgram p;
    for (const auto& s : symbols) p.traversal.push_back(make_token(s));
    p.constants = constants;
    if (input_arity >= 0) {
        p.input_arity = input_arity;
    } else {
        for (const auto& t : p.traversal)
            if (t.kind == TokenKind::input_variable)
                p.input_arity = std::max(p.input_arity, t.var_index + 1);
    }
    if (p.constants.empty() && p.constant_slots() > 0)
        p.constants.assign(p.constant_slots(), 1.0);
    return p;
}

}  // namespace symcon
