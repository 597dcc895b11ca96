#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "symcon/program.hpp"

namespace symcon {

// Domain-violation thresholds. Rows that trip one of these are flagged
// invalid instead of being clamped; the search turns invalid rows into a
// zero reward.
constexpr double kDivEpsilon = 1e-12;
constexpr double kValueOverflow = 1e30;

/// Row-major matrix of evaluation inputs, one row per observation.
struct InputMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    InputMatrix() = default;
    InputMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct EvaluationOutcome {
    std::vector<double> values;
    std::vector<char> validity;  // 1 = finite, in-domain value

    bool all_valid() const {
        for (char v : validity)
            if (!v) return false;
        return true;
    }
};

namespace detail {

inline bool apply_unary(OpCode op, double x, double& out) {
    switch (op) {
        case OpCode::sqrt:
            if (x < 0.0) return false;
            out = std::sqrt(x);
            break;
        case OpCode::exp:
            out = std::exp(x);
            break;
        case OpCode::log:
            if (x <= 0.0) return false;
            out = std::log(x);
            break;
        case OpCode::n2:
            out = x * x;
            break;
        case OpCode::tanh:
            out = std::tanh(x);
            break;
        case OpCode::erf:
            out = std::erf(x);
            break;
        default:
            return false;
    }
    return std::isfinite(out) && std::fabs(out) <= kValueOverflow;
}

inline bool apply_binary(OpCode op, double a, double b, double& out) {
    switch (op) {
        case OpCode::add: out = a + b; break;
        case OpCode::sub: out = a - b; break;
        case OpCode::mul: out = a * b; break;
        case OpCode::div:
            if (std::fabs(b) < kDivEpsilon) return false;
            out = a / b;
            break;
        default:
            return false;
    }
    return std::isfinite(out) && std::fabs(out) <= kValueOverflow;
}

// Recursive single-row interpreter. cursor/const_cursor advance through the
// pre-order traversal; invalid set once a domain violation occurs (the
// remaining subtree is still consumed to keep the cursors consistent).
inline double eval_row(const ExpressionProgram& p, const double* row, std::size_t& cursor,
                       std::size_t& const_cursor, bool& invalid) {
    const Token& t = p.traversal[cursor++];
    switch (t.kind) {
        case TokenKind::constant_placeholder:
            return p.constants[const_cursor++];
        case TokenKind::input_variable:
            return row[t.var_index];
        case TokenKind::unary_op: {
            double x = eval_row(p, row, cursor, const_cursor, invalid);
            double out = 0.0;
            if (!invalid && !apply_unary(t.op, x, out)) invalid = true;
            return out;
        }
        case TokenKind::binary_op: {
            double a = eval_row(p, row, cursor, const_cursor, invalid);
            double b = eval_row(p, row, cursor, const_cursor, invalid);
            double out = 0.0;
            if (!invalid && !apply_binary(t.op, a, b, out)) invalid = true;
            return out;
        }
    }
    invalid = true;
    return 0.0;
}

}  // namespace detail

/// Evaluates a single input row. Returns (value, valid).
inline std::pair<double, bool> evaluate_row(const ExpressionProgram& program, const double* row) {
    std::size_t cursor = 0, const_cursor = 0;
    bool invalid = false;
    double v = detail::eval_row(program, row, cursor, const_cursor, invalid);
    if (cursor != program.traversal.size())
        throw std::logic_error("evaluate: structurally invalid program");
    if (!invalid && (!std::isfinite(v) || std::fabs(v) > kValueOverflow)) invalid = true;
    return { v, !invalid };
}

/// Reusable workspace for evaluating one program over many rows at once.
/// Scans the pre-order traversal right to left with a stack of value
/// buffers, so the row loop stays tight inside each node. On a binary
/// node the top of the stack is the left operand.
class BatchEvaluator {
public:
    void operator()(const ExpressionProgram& p, const InputMatrix& in, EvaluationOutcome& out) {
        const std::size_t n = in.rows;
        const std::size_t len = p.traversal.size();
        const_slot_.resize(len);
        std::size_t cc = 0;
        for (std::size_t i = 0; i < len; ++i)
            const_slot_[i] = (p.traversal[i].kind == TokenKind::constant_placeholder) ? cc++ : 0;

        out.values.assign(n, 0.0);
        out.validity.assign(n, 1);
        std::size_t top = 0;  // number of live stack buffers

        for (std::size_t k = len; k-- > 0;) {
            const Token& t = p.traversal[k];
            switch (t.kind) {
                case TokenKind::input_variable: {
                    auto& buf = buffer(top++);
                    buf.resize(n);
                    for (std::size_t r = 0; r < n; ++r) buf[r] = in.at(r, t.var_index);
                    break;
                }
                case TokenKind::constant_placeholder: {
                    auto& buf = buffer(top++);
                    buf.assign(n, p.constants[const_slot_[k]]);
                    break;
                }
                case TokenKind::unary_op: {
                    auto& buf = stack_[top - 1];
                    for (std::size_t r = 0; r < n; ++r) {
                        if (!out.validity[r]) { buf[r] = 0.0; continue; }
                        double v = 0.0;
                        if (!detail::apply_unary(t.op, buf[r], v)) { out.validity[r] = 0; v = 0.0; }
                        buf[r] = v;
                    }
                    break;
                }
                case TokenKind::binary_op: {
                    auto& lhs = stack_[top - 1];
                    auto& dst = stack_[top - 2];
                    for (std::size_t r = 0; r < n; ++r) {
                        if (!out.validity[r]) { dst[r] = 0.0; continue; }
                        double v = 0.0;
                        if (!detail::apply_binary(t.op, lhs[r], dst[r], v)) { out.validity[r] = 0; v = 0.0; }
                        dst[r] = v;
                    }
                    --top;
                    break;
                }
            }
        }
        auto& root = stack_[0];
        for (std::size_t r = 0; r < n; ++r) {
            out.values[r] = root[r];
            if (out.validity[r] && (!std::isfinite(root[r]) || std::fabs(root[r]) > kValueOverflow))
                out.validity[r] = 0;
        }
    }

private:
    std::vector<double>& buffer(std::size_t idx) {
        if (idx >= stack_.size()) stack_.resize(idx + 1);
        return stack_[idx];
    }

    std::vector<std::vector<double>> stack_;
    std::vector<std::size_t> const_slot_;
};

/// Row-wise evaluation of the decoded expression over an input matrix.
/// Domain violations are flagged per row, never thrown.
inline EvaluationOutcome evaluate(const ExpressionProgram& program, const InputMatrix& inputs) {
    if (!program.valid()) throw std::logic_error("evaluate: structurally invalid program");
    if (program.input_arity > static_cast<int>(inputs.cols))
        throw std::logic_error("evaluate: input matrix narrower than program input arity");
    EvaluationOutcome out;
    out.values.resize(inputs.rows);
    out.validity.resize(inputs.rows);
    for (std::size_t r = 0; r < inputs.rows; ++r) {
        auto [v, ok] = evaluate_row(program, &inputs.data[r * inputs.cols]);
        out.values[r] = v;
        out.validity[r] = ok ? 1 : 0;
    }
    return out;
}

}  // namespace symcon
