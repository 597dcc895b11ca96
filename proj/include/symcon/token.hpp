#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace symcon {

enum class TokenKind : std::uint8_t {
    binary_op,
    unary_op,
    input_variable,
    constant_placeholder,
};

enum class OpCode : std::uint8_t {
    add,
    sub,
    mul,
    div,
    sqrt,
    exp,
    log,
    n2,   // squaring, x -> x^2
    tanh,
    erf,
    var,
    constant,
};

struct Token {
    TokenKind kind = TokenKind::constant_placeholder;
    OpCode op = OpCode::constant;
    std::string symbol;
    int arity = 0;
    int var_index = -1;  // only meaningful for input variables
};

inline Token make_token(const std::string& symbol) {
    struct Entry {
        const char* name;
        OpCode op;
        TokenKind kind;
        int arity;
    };
    static const Entry table[] = {
        { "add", OpCode::add, TokenKind::binary_op, 2 },
        { "sub", OpCode::sub, TokenKind::binary_op, 2 },
        { "mul", OpCode::mul, TokenKind::binary_op, 2 },
        { "div", OpCode::div, TokenKind::binary_op, 2 },
        { "sqrt", OpCode::sqrt, TokenKind::unary_op, 1 },
        { "exp", OpCode::exp, TokenKind::unary_op, 1 },
        { "log", OpCode::log, TokenKind::unary_op, 1 },
        { "n2", OpCode::n2, TokenKind::unary_op, 1 },
        { "tanh", OpCode::tanh, TokenKind::unary_op, 1 },
        { "erf", OpCode::erf, TokenKind::unary_op, 1 },
        { "const", OpCode::constant, TokenKind::constant_placeholder, 0 },
    };
    for (const auto& e : table) {
        if (symbol == e.name) return Token{ e.kind, e.op, e.name, e.arity, -1 };
    }
    // variables are named x1, x2, ... (1-based in the name, 0-based in var_index)
    if (symbol.size() >= 2 && symbol[0] == 'x') {
        int idx = std::stoi(symbol.substr(1));
        if (idx >= 1) return Token{ TokenKind::input_variable, OpCode::var, symbol, 0, idx - 1 };
    }
    throw std::invalid_argument("unknown token symbol: " + symbol);
}

/// An ordered set of tokens a sampler or parser may draw from. The symbol
/// uniquely determines kind and arity within one library.
class TokenLibrary {
public:
    TokenLibrary() = default;

    explicit TokenLibrary(const std::vector<std::string>& symbols) {
        for (const auto& s : symbols) add(s);
    }

    int add(const std::string& symbol) {
        tokens_.push_back(make_token(symbol));
        return static_cast<int>(tokens_.size()) - 1;
    }

    int size() const { return static_cast<int>(tokens_.size()); }
    const Token& operator[](int id) const { return tokens_[id]; }
    const std::vector<Token>& tokens() const { return tokens_; }

    int find(const std::string& symbol) const {
        for (int i = 0; i < size(); ++i)
            if (tokens_[i].symbol == symbol) return i;
        return -1;
    }

    int input_arity() const {
        int n = 0;
        for (const auto& t : tokens_)
            if (t.kind == TokenKind::input_variable) n = std::max(n, t.var_index + 1);
        return n;
    }

    bool has_constant() const {
        for (const auto& t : tokens_)
            if (t.kind == TokenKind::constant_placeholder) return true;
        return false;
    }

private:
    std::vector<Token> tokens_;
};

/// Operator set used to search for strain energy functions.
inline TokenLibrary step1_library(int n_inputs) {
    std::vector<std::string> syms = { "add", "sub", "n2", "mul", "div", "sqrt", "exp", "log", "const" };
    for (int i = 1; i <= n_inputs; ++i) syms.push_back("x" + std::to_string(i));
    return TokenLibrary(syms);
}

/// Operator set used to search for damage functions.
inline TokenLibrary step2_library(int n_inputs) {
    std::vector<std::string> syms = { "add", "sub", "mul", "tanh", "div", "erf", "const" };
    for (int i = 1; i <= n_inputs; ++i) syms.push_back("x" + std::to_string(i));
    return TokenLibrary(syms);
}

}  // namespace symcon
