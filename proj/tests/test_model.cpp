#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>

#include "dcop/model.hpp"
#include "dcop/rng.hpp"

using namespace dcop;

namespace {

// The worked four-agent example: tables (x_deep, x_shallow) -> {5, 8, 20, 2}
// on edges (x2,x1), (x3,x2), (x4,x2).
DcopInstance star4() {
    DcopInstance inst;
    inst.set_name("star4");
    AgentIndex a1 = inst.add_agent("a1");
    AgentIndex a2 = inst.add_agent("a2");
    AgentIndex a3 = inst.add_agent("a3");
    AgentIndex a4 = inst.add_agent("a4");
    VarIndex x1 = inst.add_variable("x1", a1, 0, 1);
    VarIndex x2 = inst.add_variable("x2", a2, 0, 1);
    VarIndex x3 = inst.add_variable("x3", a3, 0, 1);
    VarIndex x4 = inst.add_variable("x4", a4, 0, 1);
    std::vector<std::pair<std::vector<Value>, std::int64_t>> rows{
        {{0, 0}, 5}, {{0, 1}, 8}, {{1, 0}, 20}, {{1, 1}, 2}};
    inst.add_table_constraint("c12", {x2, x1}, false, rows);
    inst.add_table_constraint("c23", {x3, x2}, false, rows);
    inst.add_table_constraint("c24", {x4, x2}, false, rows);
    inst.finalize();
    return inst;
}

}  // namespace

TEST_CASE("construction rejects duplicates and broken references") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    CHECK_THROWS_AS(inst.add_agent("a"), SemanticError);
    inst.add_variable("x", a, 0, 2);
    CHECK_THROWS_AS(inst.add_variable("x", a, 0, 1), SemanticError);
    CHECK_THROWS_AS(inst.add_variable("y", 7, 0, 1), SemanticError);
    CHECK_THROWS_AS(inst.add_variable("y", a, 3, 1), SemanticError);
}

TEST_CASE("finalize validates table rows") {
    auto build = [](std::vector<std::pair<std::vector<Value>, std::int64_t>> rows) {
        DcopInstance inst;
        AgentIndex a = inst.add_agent("a");
        VarIndex x = inst.add_variable("x", a, 0, 1);
        VarIndex y = inst.add_variable("y", a, 0, 1);
        inst.add_table_constraint("c", {x, y}, false, std::move(rows));
        inst.finalize();
        return inst;
    };
    CHECK_NOTHROW(build({{{0, 0}, 3}}));
    CHECK_THROWS_AS(build({{{0}, 3}}), SemanticError);          // arity
    CHECK_THROWS_AS(build({{{0, 2}, 3}}), SemanticError);       // out of domain
    CHECK_THROWS_AS(build({{{0, 0}, 3}, {{0, 0}, 4}}), SemanticError);  // duplicate tuple
}

TEST_CASE("finalize validates rule coefficient arity") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, 0, 1);
    VarIndex y = inst.add_variable("y", a, 0, 1);
    inst.add_rule_constraint("r", {x, y}, {1}, RelOp::Eq, 0, 0);
    CHECK_THROWS_AS(inst.finalize(), SemanticError);
}

TEST_CASE("scope may not repeat a variable") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, 0, 1);
    inst.add_table_constraint("c", {x, x}, false, {});
    CHECK_THROWS_AS(inst.finalize(), SemanticError);
}

TEST_CASE("table lookup: explicit rows, default zero, default neginf") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, 0, 2);
    VarIndex y = inst.add_variable("y", a, 0, 2);
    inst.add_table_constraint("zero", {x, y}, false, {{{1, 2}, 44}});
    inst.add_table_constraint("inf", {x, y}, true, {{{1, 2}, 44}});
    inst.finalize();

    Assignment asg(inst.num_variables());
    asg.bind(x, 1);
    asg.bind(y, 2);
    CHECK(evaluate_constraint(inst, inst.constraint(0), asg) == Utility::finite(44));
    CHECK(evaluate_constraint(inst, inst.constraint(1), asg) == Utility::finite(44));
    asg.bind(y, 0);
    CHECK(evaluate_constraint(inst, inst.constraint(0), asg) == Utility::finite(0));
    CHECK(evaluate_constraint(inst, inst.constraint(1), asg).is_neg_inf());
}

TEST_CASE("flat and binary-search table lookups agree") {
    // Three variables with domain 17 make the product 4913, above the flat
    // cap, so this instance exercises the binary-search path; a small clone
    // exercises the flat path. Both must agree with a hand map.
    DcopInstance big;
    AgentIndex a = big.add_agent("a");
    VarIndex x = big.add_variable("x", a, 0, 16);
    VarIndex y = big.add_variable("y", a, 0, 16);
    VarIndex z = big.add_variable("z", a, 0, 16);
    std::vector<std::pair<std::vector<Value>, std::int64_t>> rows;
    SplitMix64 rng(123);
    for (int i = 0; i < 40; ++i) {
        Value vx = static_cast<Value>(rng.next_below(17));
        Value vy = static_cast<Value>(rng.next_below(17));
        Value vz = static_cast<Value>(rng.next_below(17));
        bool dup = false;
        for (const auto& [t, u] : rows) dup = dup || (t[0] == vx && t[1] == vy && t[2] == vz);
        if (dup) continue;
        rows.push_back({{vx, vy, vz}, rng.next_int(-50, 50)});
    }
    big.add_table_constraint("c", {x, y, z}, true, rows);
    big.finalize();
    CHECK(big.constraint(0).table().flat.empty());

    DcopInstance small;
    AgentIndex b = small.add_agent("a");
    VarIndex sx = small.add_variable("x", b, 0, 7);
    VarIndex sy = small.add_variable("y", b, 0, 7);
    std::vector<std::pair<std::vector<Value>, std::int64_t>> srows{{{1, 2}, 9}, {{7, 0}, -4}};
    small.add_table_constraint("c", {sx, sy}, true, srows);
    small.finalize();
    CHECK_FALSE(small.constraint(0).table().flat.empty());

    for (const auto& [tuple, util] : rows)
        CHECK(big.constraint(0).evaluate(tuple) == Utility::finite(util));
    std::vector<Value> miss{0, 0, 1};
    bool in_rows = false;
    for (const auto& [t, u] : rows) in_rows = in_rows || t == miss;
    if (!in_rows) CHECK(big.constraint(0).evaluate(miss).is_neg_inf());

    CHECK(small.constraint(0).evaluate(std::vector<Value>{1, 2}) == Utility::finite(9));
    CHECK(small.constraint(0).evaluate(std::vector<Value>{7, 0}) == Utility::finite(-4));
    CHECK(small.constraint(0).evaluate(std::vector<Value>{0, 0}).is_neg_inf());
}

TEST_CASE("rules evaluate the linear form against the bound") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, -2, 2);
    VarIndex y = inst.add_variable("y", a, -2, 2);
    inst.add_rule_constraint("eq", {x, y}, {1, 1}, RelOp::Eq, 0, 7);
    inst.add_rule_constraint("le", {x, y}, {2, -1}, RelOp::Le, 1, 0);
    inst.finalize();

    Assignment asg(inst.num_variables());
    asg.bind(x, 1);
    asg.bind(y, -1);
    CHECK(evaluate_constraint(inst, inst.constraint(0), asg) == Utility::finite(7));
    // 2*1 - 1*(-1) = 3 > 1
    CHECK(evaluate_constraint(inst, inst.constraint(1), asg).is_neg_inf());
    asg.bind(x, 0);
    asg.bind(y, 1);
    CHECK(evaluate_constraint(inst, inst.constraint(0), asg).is_neg_inf());
    CHECK(evaluate_constraint(inst, inst.constraint(1), asg) == Utility::finite(0));
}

TEST_CASE("every relational operator") {
    CHECK(rel_holds(1, RelOp::Eq, 1));
    CHECK_FALSE(rel_holds(1, RelOp::Eq, 2));
    CHECK(rel_holds(1, RelOp::Ne, 2));
    CHECK(rel_holds(1, RelOp::Lt, 2));
    CHECK_FALSE(rel_holds(2, RelOp::Lt, 2));
    CHECK(rel_holds(2, RelOp::Le, 2));
    CHECK(rel_holds(3, RelOp::Gt, 2));
    CHECK(rel_holds(2, RelOp::Ge, 2));
}

TEST_CASE("rule linear form overflow throws") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, 2, 2);
    VarIndex y = inst.add_variable("y", a, 2, 2);
    inst.add_rule_constraint("r", {x, y}, {std::numeric_limits<std::int64_t>::max(),
                                           std::numeric_limits<std::int64_t>::max()},
                             RelOp::Ge, 0, 0);
    inst.finalize();
    Assignment asg(inst.num_variables());
    asg.bind(x, 2);
    asg.bind(y, 2);
    CHECK_THROWS_AS(evaluate_constraint(inst, inst.constraint(0), asg), OverflowError);
}

TEST_CASE("evaluate sums constraints and checks totality and domains") {
    DcopInstance inst = star4();
    Assignment asg(inst.num_variables());
    asg.bind(*inst.find_variable("x1"), 1);
    asg.bind(*inst.find_variable("x2"), 0);
    asg.bind(*inst.find_variable("x3"), 1);
    CHECK_THROWS_AS(evaluate(inst, asg), UnboundVariableError);
    asg.bind(*inst.find_variable("x4"), 1);
    // c12(0,1)=8, c23(1,0)=20, c24(1,0)=20
    CHECK(evaluate(inst, asg) == Utility::finite(48));
    asg.bind(*inst.find_variable("x4"), 9);
    CHECK_THROWS_AS(evaluate(inst, asg), OutOfDomainError);
}

TEST_CASE("assignment bind, unbind, totality") {
    Assignment a(3);
    CHECK_FALSE(a.is_total());
    CHECK(a.bound_count() == 0);
    a.bind(0, 5);
    a.bind(2, -1);
    CHECK(a.bound_count() == 2);
    CHECK(a.value(0) == 5);
    CHECK_THROWS_AS(a.value(1), UnboundVariableError);
    a.unbind(0);
    CHECK_FALSE(a.is_bound(0));
    a.bind(0, 1);
    a.bind(1, 0);
    CHECK(a.is_total());
}

TEST_CASE("constraint graph is deduplicated and canonically ordered") {
    DcopInstance inst = star4();
    ConstraintGraph g = build_constraint_graph(inst);
    VarIndex x1 = *inst.find_variable("x1");
    VarIndex x2 = *inst.find_variable("x2");
    VarIndex x3 = *inst.find_variable("x3");
    VarIndex x4 = *inst.find_variable("x4");

    REQUIRE(g.var_edges.size() == 3);
    CHECK(g.var_edges[0] == std::pair(x1, x2));
    CHECK(g.var_edges[1] == std::pair(x2, x3));
    CHECK(g.var_edges[2] == std::pair(x2, x4));
    CHECK(g.var_adj[static_cast<std::size_t>(x2)] == std::vector<VarIndex>{x1, x3, x4});

    REQUIRE(g.agent_edges.size() == 3);
    CHECK(g.agent_adj[static_cast<std::size_t>(*inst.find_agent("a2"))].size() == 3);
}

TEST_CASE("intra-agent constraints add no agent edge") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    AgentIndex b = inst.add_agent("b");
    VarIndex x = inst.add_variable("x", a, 0, 1);
    VarIndex y = inst.add_variable("y", a, 0, 1);
    VarIndex z = inst.add_variable("z", b, 0, 1);
    inst.add_rule_constraint("r1", {x, y}, {1, 1}, RelOp::Eq, 0, 0);
    inst.add_rule_constraint("r2", {y, z}, {1, 1}, RelOp::Eq, 0, 0);
    inst.finalize();
    ConstraintGraph g = build_constraint_graph(inst);
    CHECK(g.var_edges.size() == 2);
    REQUIRE(g.agent_edges.size() == 1);
    CHECK(g.agent_edges[0] == std::pair(a, b));
}

TEST_CASE("a wide scope induces pairwise edges") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, 0, 1);
    VarIndex y = inst.add_variable("y", a, 0, 1);
    VarIndex z = inst.add_variable("z", a, 0, 1);
    inst.add_rule_constraint("r", {x, y, z}, {1, 1, 1}, RelOp::Eq, 1, 0);
    inst.finalize();
    ConstraintGraph g = build_constraint_graph(inst);
    CHECK(g.var_edges.size() == 3);
}

TEST_CASE("structural equality ignores declaration order") {
    DcopInstance a = star4();

    DcopInstance b;
    AgentIndex b4 = b.add_agent("a4");
    AgentIndex b2 = b.add_agent("a2");
    AgentIndex b1 = b.add_agent("a1");
    AgentIndex b3 = b.add_agent("a3");
    VarIndex x4 = b.add_variable("x4", b4, 0, 1);
    VarIndex x2 = b.add_variable("x2", b2, 0, 1);
    VarIndex x1 = b.add_variable("x1", b1, 0, 1);
    VarIndex x3 = b.add_variable("x3", b3, 0, 1);
    std::vector<std::pair<std::vector<Value>, std::int64_t>> rows{
        {{1, 1}, 2}, {{1, 0}, 20}, {{0, 1}, 8}, {{0, 0}, 5}};
    b.add_table_constraint("c24", {x4, x2}, false, rows);
    b.add_table_constraint("c23", {x3, x2}, false, rows);
    b.add_table_constraint("c12", {x2, x1}, false, rows);
    b.finalize();

    CHECK(structurally_equal(a, b));
    CHECK(structurally_equal(b, a));

    DcopInstance c = star4();
    // same shape, one utility nudged
    DcopInstance d;
    AgentIndex da1 = d.add_agent("a1");
    AgentIndex da2 = d.add_agent("a2");
    AgentIndex da3 = d.add_agent("a3");
    AgentIndex da4 = d.add_agent("a4");
    VarIndex dx1 = d.add_variable("x1", da1, 0, 1);
    VarIndex dx2 = d.add_variable("x2", da2, 0, 1);
    VarIndex dx3 = d.add_variable("x3", da3, 0, 1);
    VarIndex dx4 = d.add_variable("x4", da4, 0, 1);
    std::vector<std::pair<std::vector<Value>, std::int64_t>> rows2{
        {{0, 0}, 5}, {{0, 1}, 8}, {{1, 0}, 21}, {{1, 1}, 2}};
    d.add_table_constraint("c12", {dx2, dx1}, false, rows2);
    d.add_table_constraint("c23", {dx3, dx2}, false, rows2);
    d.add_table_constraint("c24", {dx4, dx2}, false, rows2);
    d.finalize();
    CHECK_FALSE(structurally_equal(c, d));
}

TEST_CASE("name ranks order by name, not declaration") {
    DcopInstance inst;
    AgentIndex b = inst.add_agent("b");
    AgentIndex a = inst.add_agent("a");
    inst.add_variable("v2", b, 0, 0);
    inst.add_variable("v10", a, 0, 0);
    inst.finalize();
    CHECK(inst.agent_rank(a) == 0);
    CHECK(inst.agent_rank(b) == 1);
    // lexicographic: "v10" < "v2"
    CHECK(inst.var_rank(*inst.find_variable("v10")) == 0);
    CHECK(inst.var_rank(*inst.find_variable("v2")) == 1);
}
