#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dcop/generate.hpp"
#include "dcop/io.hpp"
#include "dcop/oracle.hpp"

using namespace dcop;

namespace {

std::string fixture(const std::string& name) { return std::string(DCOP_FIXTURE_DIR) + "/" + name; }

}  // namespace

TEST_CASE("the worked example maximizes at 48 with a unique witness") {
    DcopInstance inst = load_instance(fixture("star4.dcop"));
    OracleResult r = brute_force(inst);
    CHECK(r.utility == Utility::finite(48));
    REQUIRE(r.assignment.has_value());
    CHECK(r.assignment->value(*inst.find_variable("x1")) == 1);
    CHECK(r.assignment->value(*inst.find_variable("x2")) == 0);
    CHECK(r.assignment->value(*inst.find_variable("x3")) == 1);
    CHECK(r.assignment->value(*inst.find_variable("x4")) == 1);
    CHECK(evaluate(inst, *r.assignment) == r.utility);
    // complete tables: every one of the 2^4 assignments is feasible
    CHECK(count_feasible(inst) == 16);
}

TEST_CASE("ties resolve to the smallest tuple in variable name order") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    // declared out of name order on purpose
    VarIndex zz = inst.add_variable("zz", a, 5, 6);
    VarIndex mm = inst.add_variable("mm", a, -2, 0);
    VarIndex aa = inst.add_variable("aa", a, 1, 2);
    inst.add_rule_constraint("flat", {zz, mm, aa}, {0, 0, 0}, RelOp::Eq, 0, 9);
    inst.finalize();

    OracleResult r = brute_force(inst);
    CHECK(r.utility == Utility::finite(9));
    REQUIRE(r.assignment.has_value());
    CHECK(r.assignment->value(aa) == 1);
    CHECK(r.assignment->value(mm) == -2);
    CHECK(r.assignment->value(zz) == 5);
}

TEST_CASE("an instance with no finite assignment reports infeasible") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    AgentIndex b = inst.add_agent("b");
    VarIndex x = inst.add_variable("x", a, 0, 2);
    VarIndex y = inst.add_variable("y", b, 0, 2);
    inst.add_table_constraint("dead", {x, y}, true, {});
    inst.finalize();

    OracleResult r = brute_force(inst);
    CHECK(r.utility == Utility::neg_inf());
    CHECK_FALSE(r.assignment.has_value());
    CHECK(count_feasible(inst) == 0);
}

TEST_CASE("partially dead instances keep only the surviving tuples") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, 0, 1);
    VarIndex y = inst.add_variable("y", a, 0, 1);
    inst.add_rule_constraint("diag", {x, y}, {1, -1}, RelOp::Eq, 0, 0);  // x == y
    inst.add_table_constraint("pay", {x}, false, {{{1}, 5}});
    inst.finalize();

    CHECK(count_feasible(inst) == 2);
    OracleResult r = brute_force(inst);
    CHECK(r.utility == Utility::finite(5));
    CHECK(r.assignment->value(x) == 1);
    CHECK(r.assignment->value(y) == 1);
}

TEST_CASE("the assignment-space cap triggers strictly above the limit") {
    RandomGraphParams rp;
    rp.num_agents = 2;
    rp.num_variables = 10;
    rp.domain_size = 2;  // 2^10 = 1024 assignments
    rp.density = 0.4;
    rp.tightness = 0.2;
    rp.seed = 5;
    DcopInstance inst = generate_random(rp);

    CHECK_NOTHROW(brute_force(inst, 1024));
    CHECK_THROWS_AS(brute_force(inst, 1023), InstanceTooLargeError);
    CHECK_THROWS_AS(count_feasible(inst, 1023), InstanceTooLargeError);
}

TEST_CASE("an instance without variables is trivially optimal at zero") {
    DcopInstance inst;
    inst.finalize();
    OracleResult r = brute_force(inst);
    CHECK(r.utility == Utility::finite(0));
    REQUIRE(r.assignment.has_value());
    CHECK(r.assignment->is_total());
}
