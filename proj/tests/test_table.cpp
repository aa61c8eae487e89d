#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "dcop/io.hpp"
#include "dcop/rng.hpp"
#include "dcop/table.hpp"

using namespace dcop;

namespace {

std::string fixture(const std::string& name) { return std::string(DCOP_FIXTURE_DIR) + "/" + name; }

ScopeVar scope_var(const DcopInstance& inst, VarIndex v) {
    const Variable& var = inst.variable(v);
    return ScopeVar{v, var.low, var.high};
}

const Constraint& constraint_named(const DcopInstance& inst, const std::string& name) {
    return inst.constraint(*inst.find_constraint(name));
}

}  // namespace

TEST_CASE("index_of and tuple_of round-trip, last variable fastest") {
    UtilTable t({ScopeVar{0, -1, 1}, ScopeVar{1, 5, 7}, ScopeVar{2, 0, 1}}, UtilTable::Repr::Sparse);
    CHECK(t.domain_product() == 18);

    std::vector<Value> tuple(3);
    for (std::uint64_t idx = 0; idx < t.domain_product(); ++idx) {
        t.tuple_of(idx, tuple);
        CHECK(t.index_of(tuple) == idx);
    }
    // adjacent indices differ in the last position first
    t.tuple_of(0, tuple);
    CHECK(tuple == std::vector<Value>{-1, 5, 0});
    t.tuple_of(1, tuple);
    CHECK(tuple == std::vector<Value>{-1, 5, 1});
    t.tuple_of(2, tuple);
    CHECK(tuple == std::vector<Value>{-1, 6, 0});

    std::vector<Value> outside{-2, 5, 0};
    CHECK_THROWS_AS(t.index_of(outside), OutOfDomainError);
    std::vector<Value> short_tuple{0, 5};
    CHECK_THROWS_AS(t.index_of(short_tuple), ScopeMismatchError);
}

TEST_CASE("empty scope is a single-row table") {
    UtilTable t;
    CHECK(t.domain_product() == 1);
    CHECK(t.lookup_index(0) == Utility::neg_inf());
    t.set_index(0, Utility::finite(42));
    CHECK(t.lookup_index(0) == Utility::finite(42));
}

TEST_CASE("sparse tables drop neginf writes instead of storing them") {
    UtilTable t({ScopeVar{0, 0, 2}}, UtilTable::Repr::Sparse);
    t.set_index(1, Utility::finite(9));
    CHECK(t.row_count() == 1);
    t.set_index(1, Utility::neg_inf());
    CHECK(t.row_count() == 0);
    CHECK(t.lookup_index(1) == Utility::neg_inf());

    UtilTable d({ScopeVar{0, 0, 2}}, UtilTable::Repr::Dense);
    CHECK(d.row_count() == 3);  // dense rows exist regardless of content
}

TEST_CASE("from_constraint matches direct evaluation on every tuple") {
    DcopInstance inst = load_instance(fixture("star4.dcop"));
    for (const Constraint& c : inst.constraints()) {
        UtilTable t = UtilTable::from_constraint(inst, c);
        CHECK(t.repr() == UtilTable::Repr::Dense);  // fixture tables default to 0
        std::vector<Value> tuple(c.scope.size());
        for (std::uint64_t idx = 0; idx < t.domain_product(); ++idx) {
            t.tuple_of(idx, tuple);
            CHECK(t.lookup_index(idx) == c.evaluate(tuple));
        }
    }
}

TEST_CASE("default-neginf constraints and rules become sparse tables") {
    DcopInstance inst;
    AgentIndex a = inst.add_agent("a");
    VarIndex x = inst.add_variable("x", a, 0, 2);
    VarIndex y = inst.add_variable("y", a, 0, 2);
    inst.add_table_constraint("t", {x, y}, true, {{{0, 0}, 3}, {{2, 1}, 7}});
    inst.add_rule_constraint("r", {x, y}, {1, -1}, RelOp::Eq, 0, 5);
    inst.finalize();

    UtilTable t = UtilTable::from_constraint(inst, constraint_named(inst, "t"));
    CHECK(t.repr() == UtilTable::Repr::Sparse);
    CHECK(t.row_count() == 2);

    UtilTable r = UtilTable::from_constraint(inst, constraint_named(inst, "r"));
    CHECK(r.repr() == UtilTable::Repr::Sparse);
    CHECK(r.row_count() == 3);  // x == y has three satisfying tuples
    std::vector<Value> diag{1, 1};
    CHECK(r.lookup(diag) == Utility::finite(5));
    std::vector<Value> off{1, 2};
    CHECK(r.lookup(off) == Utility::neg_inf());
}

TEST_CASE("joining the worked example's messages reproduces its combined table") {
    DcopInstance inst = load_instance(fixture("star4.dcop"));
    VarIndex x1 = *inst.find_variable("x1");
    VarIndex x2 = *inst.find_variable("x2");

    // UTIL messages the two leaves send up: both are {x2=0 -> 20, x2=1 -> 8}.
    UtilTable m3({scope_var(inst, x2)}, UtilTable::Repr::Sparse);
    std::vector<Value> v0{0}, v1{1};
    m3.set(v0, Utility::finite(20));
    m3.set(v1, Utility::finite(8));
    UtilTable m4 = m3;

    UtilTable c12 = UtilTable::from_constraint(inst, constraint_named(inst, "c12"));

    const UtilTable* inputs[] = {&c12, &m3, &m4};
    UtilTable joined = join_tables(inputs, {scope_var(inst, x2), scope_var(inst, x1)});
    CHECK(joined.repr() == UtilTable::Repr::Sparse);  // any sparse input makes a sparse join
    CHECK(joined.row_count() == 4);

    auto at = [&](Value a2, Value a1) {
        std::vector<Value> tup{a2, a1};
        return joined.lookup(tup);
    };
    CHECK(at(0, 0) == Utility::finite(45));
    CHECK(at(0, 1) == Utility::finite(48));
    CHECK(at(1, 0) == Utility::finite(36));
    CHECK(at(1, 1) == Utility::finite(18));
}

TEST_CASE("join treats neginf as absorbing") {
    UtilTable feasible({ScopeVar{0, 0, 1}}, UtilTable::Repr::Dense);
    feasible.set_index(0, Utility::finite(10));
    feasible.set_index(1, Utility::finite(20));
    UtilTable gate({ScopeVar{0, 0, 1}}, UtilTable::Repr::Sparse);
    std::vector<Value> one{1};
    gate.set(one, Utility::finite(1));  // value 0 stays neginf

    const UtilTable* inputs[] = {&feasible, &gate};
    UtilTable joined = join_tables(inputs, {ScopeVar{0, 0, 1}});
    CHECK(joined.row_count() == 1);
    CHECK(joined.lookup_index(0) == Utility::neg_inf());
    CHECK(joined.lookup_index(1) == Utility::finite(21));

    // all-dense joins stay dense and materialize the neginf row
    UtilTable gate_dense({ScopeVar{0, 0, 1}}, UtilTable::Repr::Dense);
    gate_dense.set_index(1, Utility::finite(1));
    const UtilTable* dense_inputs[] = {&feasible, &gate_dense};
    UtilTable dense_joined = join_tables(dense_inputs, {ScopeVar{0, 0, 1}});
    CHECK(dense_joined.repr() == UtilTable::Repr::Dense);
    CHECK(dense_joined.row_count() == 2);
    CHECK(dense_joined.same_function(joined));
}

TEST_CASE("join scope must cover every input") {
    UtilTable t({ScopeVar{0, 0, 1}, ScopeVar{1, 0, 1}}, UtilTable::Repr::Dense);
    const UtilTable* inputs[] = {&t};
    CHECK_THROWS_AS(join_tables(inputs, {ScopeVar{0, 0, 1}}), ScopeMismatchError);
    // same variable id with different bounds is a different scope entry
    CHECK_THROWS_AS(join_tables(inputs, {ScopeVar{0, 0, 1}, ScopeVar{1, 0, 2}}), ScopeMismatchError);
}

TEST_CASE("join agrees with summed constraint evaluation on random instances") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        SplitMix64 rng(seed * 1299709);
        DcopInstance inst;
        AgentIndex a = inst.add_agent("a");
        VarIndex x = inst.add_variable("x", a, -1, static_cast<Value>(rng.next_int(0, 2)));
        VarIndex y = inst.add_variable("y", a, 0, static_cast<Value>(rng.next_int(1, 3)));
        VarIndex z = inst.add_variable("z", a, 0, 2);
        std::vector<std::pair<std::vector<Value>, std::int64_t>> rows;
        for (Value vx = inst.variable(x).low; vx <= inst.variable(x).high; ++vx)
            for (Value vy = inst.variable(y).low; vy <= inst.variable(y).high; ++vy)
                if (rng.next_below(4) != 0) rows.push_back({{vx, vy}, static_cast<std::int64_t>(rng.next_below(100))});
        inst.add_table_constraint("txy", {x, y}, true, std::move(rows));
        inst.add_rule_constraint("ryz", {y, z}, {1, 1}, RelOp::Le, 3, 2);
        inst.finalize();

        const Constraint& txy = constraint_named(inst, "txy");
        const Constraint& ryz = constraint_named(inst, "ryz");
        UtilTable t1 = UtilTable::from_constraint(inst, txy);
        UtilTable t2 = UtilTable::from_constraint(inst, ryz);
        const UtilTable* inputs[] = {&t1, &t2};
        UtilTable joined = join_tables(inputs, {scope_var(inst, x), scope_var(inst, y), scope_var(inst, z)});

        std::vector<Value> tuple(3);
        for (std::uint64_t idx = 0; idx < joined.domain_product(); ++idx) {
            joined.tuple_of(idx, tuple);
            std::vector<Value> xy{tuple[0], tuple[1]};
            std::vector<Value> yz{tuple[1], tuple[2]};
            CHECK(joined.lookup_index(idx) == txy.evaluate(xy) + ryz.evaluate(yz));
        }
    }
}

TEST_CASE("same_function sees through the representation") {
    UtilTable dense({ScopeVar{3, 0, 1}}, UtilTable::Repr::Dense);
    dense.set_index(0, Utility::finite(4));
    UtilTable sparse({ScopeVar{3, 0, 1}}, UtilTable::Repr::Sparse);
    sparse.set_index(0, Utility::finite(4));
    CHECK(dense.same_function(sparse));
    sparse.set_index(1, Utility::finite(0));
    CHECK_FALSE(dense.same_function(sparse));

    UtilTable other_scope({ScopeVar{4, 0, 1}}, UtilTable::Repr::Sparse);
    other_scope.set_index(0, Utility::finite(4));
    CHECK_FALSE(dense.same_function(other_scope));
}

TEST_CASE("dense materialization is capped, sparse indexing is much looser") {
    // 8192 * 8193 rows is just past the dense cap
    std::vector<ScopeVar> wide{ScopeVar{0, 0, 8191}, ScopeVar{1, 0, 8192}};
    CHECK_THROWS_AS(UtilTable(wide, UtilTable::Repr::Dense), InstanceTooLargeError);
    CHECK_NOTHROW(UtilTable(wide, UtilTable::Repr::Sparse));

    // five 1024-ary variables overflow even the sparse index space
    std::vector<ScopeVar> huge(5, ScopeVar{0, 0, 1023});
    for (int i = 0; i < 5; ++i) huge[static_cast<std::size_t>(i)].var = i;
    CHECK_THROWS_AS(UtilTable(huge, UtilTable::Repr::Sparse), InstanceTooLargeError);
}
