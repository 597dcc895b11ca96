#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include "symcon/program.hpp"

namespace symcon {

/// Shortest round-trip decimal rendering of a double ("0.63", "4", "1e-05").
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string infix_node(const ExpressionProgram& p, std::size_t& cursor,
                              std::size_t& const_cursor, const std::vector<std::string>& names) {
    const Token& t = p.traversal[cursor++];
    switch (t.kind) {
        case TokenKind::constant_placeholder:
            return format_double(p.constants[const_cursor++]);
        case TokenKind::input_variable:
            if (t.var_index < static_cast<int>(names.size())) return names[t.var_index];
            return t.symbol;
        case TokenKind::unary_op: {
            std::string inner = infix_node(p, cursor, const_cursor, names);
            if (t.op == OpCode::n2) return "(" + inner + ")^2";
            return t.symbol + "(" + inner + ")";
        }
        case TokenKind::binary_op: {
            std::string a = infix_node(p, cursor, const_cursor, names);
            std::string b = infix_node(p, cursor, const_cursor, names);
            const char* sym = t.op == OpCode::add   ? " + "
                              : t.op == OpCode::sub ? " - "
                              : t.op == OpCode::mul ? " * "
                                                    : " / ";
            return "(" + a + sym + b + ")";
        }
    }
    return "?";
}

}  // namespace detail

/// Deterministic parenthesized rendering, constants at full precision.
/// Optional variable names replace the default x1..xk.
inline std::string to_infix(const ExpressionProgram& program,
                            const std::vector<std::string>& names = {}) {
    std::size_t cursor = 0, const_cursor = 0;
    return detail::infix_node(program, cursor, const_cursor, names);
}

}  // namespace symcon
