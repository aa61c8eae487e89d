#include "dcop/oracle.hpp"

#include <vector>

namespace dcop {

namespace {

// Shared odometer walk. visit(world) sees values in name-rank order.
template <class Visit>
void scan(const DcopInstance& inst, std::uint64_t max_assignments, Visit&& visit) {
    if (!inst.finalized()) throw Error("oracle: instance not finalized");
    const std::size_t n = inst.num_variables();

    std::uint64_t space = 1;
    std::vector<Value> lows(n), highs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Variable& v = inst.variable(inst.var_by_rank(static_cast<int>(i)));
        lows[i] = v.low;
        highs[i] = v.high;
        std::uint64_t card = static_cast<std::uint64_t>(v.domain_size());
        if (space > max_assignments / card)
            throw InstanceTooLargeError("assignment space exceeds the oracle cap");
        space *= card;
    }
    if (space > max_assignments) throw InstanceTooLargeError("assignment space exceeds the oracle cap");

    // Constraints evaluate straight off the rank-ordered value buffer.
    std::vector<BoundConstraint> bound;
    for (const Constraint& c : inst.constraints()) {
        BoundConstraint bc;
        bc.constraint = &c;
        for (VarIndex v : c.scope) bc.positions.push_back(inst.var_rank(v));
        bound.push_back(std::move(bc));
    }

    std::vector<Value> world(lows);
    for (std::uint64_t step = 0; step < space; ++step) {
        Utility total = Utility::finite(0);
        for (const BoundConstraint& bc : bound) {
            total += bc.eval(world);
            if (total.is_neg_inf()) break;
        }
        visit(static_cast<std::span<const Value>>(world), total);

        for (std::size_t i = n; i-- > 0;) {
            if (world[i] < highs[i]) {
                ++world[i];
                break;
            }
            world[i] = lows[i];
        }
    }
}

}  // namespace

OracleResult brute_force(const DcopInstance& inst, std::uint64_t max_assignments) {
    OracleResult result;
    std::vector<Value> best;
    scan(inst, max_assignments, [&](std::span<const Value> world, Utility total) {
        if (total.is_finite() && total > result.utility) {
            result.utility = total;
            best.assign(world.begin(), world.end());
        }
    });
    if (!best.empty() || inst.num_variables() == 0) {
        if (result.utility.is_finite()) {
            Assignment a(inst.num_variables());
            for (std::size_t i = 0; i < best.size(); ++i)
                a.bind(inst.var_by_rank(static_cast<int>(i)), best[i]);
            result.assignment = std::move(a);
        }
    }
    return result;
}

std::uint64_t count_feasible(const DcopInstance& inst, std::uint64_t max_assignments) {
    std::uint64_t count = 0;
    scan(inst, max_assignments, [&](std::span<const Value>, Utility total) {
        if (total.is_finite()) ++count;
    });
    return count;
}

}  // namespace dcop
