#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <random>

#include "symcon/evaluate.hpp"
#include "symcon/infix.hpp"
#include "symcon/program.hpp"
#include "symcon/sampler.hpp"
#include "symcon/simplify.hpp"
#include "symcon/token.hpp"

using namespace symcon;

namespace {

// Independent oracle: a plain recursive tree interpreter, built from its own
// parse of the traversal. Domain violations surface as NaN.
struct OracleNode {
    Token token;
    double constant = 0.0;
    std::vector<std::unique_ptr<OracleNode>> kids;
};

std::unique_ptr<OracleNode> oracle_parse(const ExpressionProgram& p, std::size_t& cur,
                                         std::size_t& cc) {
    auto n = std::make_unique<OracleNode>();
    n->token = p.traversal[cur++];
    if (n->token.kind == TokenKind::constant_placeholder) n->constant = p.constants[cc++];
    for (int i = 0; i < n->token.arity; ++i) n->kids.push_back(oracle_parse(p, cur, cc));
    return n;
}

double oracle_eval(const OracleNode& n, const double* row) {
    switch (n.token.op) {
        case OpCode::var: return row[n.token.var_index];
        case OpCode::constant: return n.constant;
        case OpCode::add: return oracle_eval(*n.kids[0], row) + oracle_eval(*n.kids[1], row);
        case OpCode::sub: return oracle_eval(*n.kids[0], row) - oracle_eval(*n.kids[1], row);
        case OpCode::mul: return oracle_eval(*n.kids[0], row) * oracle_eval(*n.kids[1], row);
        case OpCode::div: {
            double b = oracle_eval(*n.kids[1], row);
            return oracle_eval(*n.kids[0], row) / b;
        }
        case OpCode::sqrt: {
            double x = oracle_eval(*n.kids[0], row);
            return x < 0 ? std::nan("") : std::sqrt(x);
        }
        case OpCode::exp: return std::exp(oracle_eval(*n.kids[0], row));
        case OpCode::log: {
            double x = oracle_eval(*n.kids[0], row);
            return x <= 0 ? std::nan("") : std::log(x);
        }
        case OpCode::n2: {
            double x = oracle_eval(*n.kids[0], row);
            return x * x;
        }
        case OpCode::tanh: return std::tanh(oracle_eval(*n.kids[0], row));
        case OpCode::erf: return std::erf(oracle_eval(*n.kids[0], row));
    }
    return std::nan("");
}

}  // namespace

TEST_CASE("validate_traversal on hand-traced sequences") {
    auto mk = [](std::vector<std::string> syms) {
        std::vector<Token> t;
        for (auto& s : syms) t.push_back(make_token(s));
        return t;
    };
    CHECK(validate_traversal(mk({ "add", "x1", "x1" })).ok);
    // balance trace 1 -> 2 -> 1 -> 2 -> 1 -> 0 for c*(x1 - c)
    CHECK(validate_traversal(mk({ "mul", "const", "sub", "x1", "const" })).ok);

    auto bad = validate_traversal(mk({ "add", "x1" }));
    CHECK_FALSE(bad.ok);
    CHECK(bad.diagnostic == "incomplete at end");

    auto trailing = validate_traversal(mk({ "x1", "x1" }));
    CHECK_FALSE(trailing.ok);
    CHECK(trailing.diagnostic.find("position 0") != std::string::npos);

    CHECK_FALSE(validate_traversal({}).ok);
}

TEST_CASE("evaluate decodes pre-order programs row-wise") {
    InputMatrix in(1, 2);
    in.at(0, 0) = 2.0;
    in.at(0, 1) = 3.0;
    auto sum = make_program({ "add", "x1", "x2" });
    auto out = evaluate(sum, in);
    CHECK(out.validity[0] == 1);
    CHECK(out.values[0] == 5.0);

    auto logp = make_program({ "log", "x1" });
    InputMatrix neg(1, 1);
    neg.at(0, 0) = -1.0;
    auto lo = evaluate(logp, neg);
    CHECK(lo.validity[0] == 0);

    // Table A1 case-1 shape evaluated at the undeformed state
    auto model = make_program({ "add", "add", "mul", "const", "x1", "mul", "const", "x2", "const" },
                              { 0.63, 0.39, 0.39 });
    InputMatrix ref(1, 2);
    ref.at(0, 0) = 3.0;
    ref.at(0, 1) = 3.0;
    auto mv = evaluate(model, ref);
    CHECK(mv.validity[0] == 1);
    CHECK_THAT(mv.values[0], Catch::Matchers::WithinAbs(3.45, 1e-12));
}

TEST_CASE("protected evaluation flags domain violations instead of throwing") {
    InputMatrix in(1, 1);
    in.at(0, 0) = 1e-15;
    auto div = make_program({ "div", "const", "x1" }, { 1.0 });
    CHECK(evaluate(div, in).validity[0] == 0);  // |denominator| < 1e-12

    in.at(0, 0) = 1000.0;
    auto ex = make_program({ "exp", "x1" });
    CHECK(evaluate(ex, in).validity[0] == 0);  // overflow

    in.at(0, 0) = -4.0;
    auto sq = make_program({ "sqrt", "x1" });
    CHECK(evaluate(sq, in).validity[0] == 0);

    in.at(0, 0) = 1e20;
    auto big = make_program({ "mul", "x1", "x1" });
    CHECK(evaluate(big, in).validity[0] == 0);  // |result| > 1e30
}

TEST_CASE("to_infix renders deterministic parenthesized expressions") {
    CHECK(to_infix(make_program({ "add", "x1", "x2" })) == "(x1 + x2)");
    CHECK(to_infix(make_program({ "mul", "const", "x1" }, { 0.63 })) == "(0.63 * x1)");
    auto erfp = make_program({ "erf", "div", "sub", "x1", "x2", "const" }, { 4.0 });
    CHECK(to_infix(erfp) == "erf(((x1 - x2) / 4))");
    CHECK(to_infix(make_program({ "n2", "x1" })) == "(x1)^2");
    CHECK(to_infix(erfp, { "psi", "psi_max" }) == "erf(((psi - psi_max) / 4))");
}

TEST_CASE("round_constants_filter rounds to two decimals and prunes zeros") {
    auto model = make_program({ "add", "mul", "const", "x1", "mul", "const", "x2" },
                              { 0.6301, 0.3899 });
    auto filtered = round_constants_filter(model);
    REQUIRE(filtered.constants.size() == 2);
    CHECK(filtered.constants[0] == 0.63);
    CHECK(filtered.constants[1] == 0.39);

    auto fixed = round_constants_filter(make_program({ "mul", "const", "x1" }, { 1.0 }));
    CHECK(fixed.constants[0] == 1.0);

    // 0.004*x1 + 2.0 -> term pruned, "2" remains
    auto tiny = make_program({ "add", "mul", "const", "x1", "const" }, { 0.004, 2.0 });
    auto pruned = round_constants_filter(tiny);
    CHECK(to_infix(pruned) == "2");
    REQUIRE(pruned.constants.size() == 1);
    CHECK(pruned.constants[0] == 2.0);
    CHECK(pruned.valid());
}

TEST_CASE("round_constants_filter is idempotent") {
    std::mt19937_64 rng(7);
    TokenLibrary lib = step1_library(2);
    RnnPolicy policy(lib.size(), 16, 3);
    SamplingConstraints cons;
    std::uniform_real_distribution<double> cdist(-3.0, 3.0);
    for (int i = 0; i < 300; ++i) {
        auto ids = sample_traversal(policy, lib, cons, rng);
        auto p = program_from_ids(lib, ids);
        for (double& c : p.constants) c = cdist(rng);
        auto once = round_constants_filter(p);
        auto twice = round_constants_filter(once);
        REQUIRE(once.traversal.size() == twice.traversal.size());
        CHECK(once.constants == twice.constants);
        CHECK(to_infix(once) == to_infix(twice));
    }
}

TEST_CASE("sampled traversals are valid and conserve arity") {
    std::mt19937_64 rng(11);
    TokenLibrary lib = step1_library(2);
    RnnPolicy policy(lib.size(), 16, 5);
    SamplingConstraints cons;
    for (int i = 0; i < 10000; ++i) {
        auto ids = sample_traversal(policy, lib, cons, rng);
        auto p = program_from_ids(lib, ids);
        REQUIRE(validate_traversal(p.traversal).ok);
        long balance = 0;
        for (const auto& t : p.traversal) balance += t.arity - 1;
        REQUIRE(balance == -1);
        REQUIRE(p.traversal.size() <= static_cast<std::size_t>(cons.max_length));
        REQUIRE(p.traversal.size() >= static_cast<std::size_t>(cons.min_length));
    }
}

TEST_CASE("evaluate agrees with an independent tree interpreter") {
    std::mt19937_64 rng(23);
    TokenLibrary lib = step1_library(3);
    RnnPolicy policy(lib.size(), 16, 9);
    SamplingConstraints cons;
    std::uniform_real_distribution<double> xdist(0.1, 5.0), cdist(-2.0, 2.0);

    InputMatrix in(8, 3);
    int checked = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        auto p = program_from_ids(lib, sample_traversal(policy, lib, cons, rng));
        for (double& c : p.constants) c = cdist(rng);
        for (std::size_t r = 0; r < in.rows; ++r)
            for (std::size_t c = 0; c < in.cols; ++c) in.at(r, c) = xdist(rng);

        auto out = evaluate(p, in);
        std::size_t cur = 0, cc = 0;
        auto tree = oracle_parse(p, cur, cc);
        for (std::size_t r = 0; r < in.rows; ++r) {
            if (!out.validity[r]) continue;
            const double expect = oracle_eval(*tree, &in.data[r * in.cols]);
            REQUIRE(std::isfinite(expect));
            REQUIRE_THAT(out.values[r],
                         Catch::Matchers::WithinRel(expect, 1e-12) ||
                             Catch::Matchers::WithinAbs(expect, 1e-12));
            ++checked;
        }
    }
    CHECK(checked > 1000);  // the comparison must actually exercise valid rows
}

TEST_CASE("evaluation is deterministic and matches the scalar path") {
    std::mt19937_64 rng(31);
    TokenLibrary lib = step1_library(2);
    RnnPolicy policy(lib.size(), 16, 2);
    SamplingConstraints cons;
    InputMatrix in(5, 2);
    std::uniform_real_distribution<double> xdist(0.2, 4.0);
    for (std::size_t r = 0; r < in.rows; ++r)
        for (std::size_t c = 0; c < in.cols; ++c) in.at(r, c) = xdist(rng);

    BatchEvaluator be;
    EvaluationOutcome eo;
    for (int trial = 0; trial < 500; ++trial) {
        auto p = program_from_ids(lib, sample_traversal(policy, lib, cons, rng));
        auto a = evaluate(p, in);
        auto b = evaluate(p, in);
        REQUIRE(a.values == b.values);  // pure function of (program, inputs)
        be(p, in, eo);
        REQUIRE(eo.validity == a.validity);
        for (std::size_t r = 0; r < in.rows; ++r)
            if (a.validity[r]) REQUIRE(eo.values[r] == a.values[r]);
    }
}
