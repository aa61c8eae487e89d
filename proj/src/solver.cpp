#include "dcop/solver.hpp"

#include <algorithm>

namespace dcop {

std::string_view strategy_token(Strategy s) {
    switch (s) {
        case Strategy::Dense: return "dense";
        case Strategy::Sparse: return "sparse";
        case Strategy::Rules: return "rules";
    }
    throw Error("unreachable strategy_token");
}

Strategy parse_strategy(std::string_view token) {
    if (token == "dense") return Strategy::Dense;
    if (token == "sparse") return Strategy::Sparse;
    if (token == "rules") return Strategy::Rules;
    throw InvalidParamsError("unknown strategy: " + std::string(token));
}

ArgmaxCache::ArgmaxCache(std::vector<ScopeVar> high_scope, std::size_t low_arity)
    : high_scope_(std::move(high_scope)),
      low_arity_(low_arity),
      indexer_(high_scope_, UtilTable::Repr::Sparse) {}

void ArgmaxCache::record(std::uint64_t high_index, std::vector<Value> low_tuple, Utility utility) {
    if (low_tuple.size() != low_arity_) throw ScopeMismatchError("argmax tuple arity mismatch");
    entries_[high_index] = Entry{std::move(low_tuple), utility};
}

const ArgmaxCache::Entry& ArgmaxCache::lookup(std::span<const Value> high_tuple) const {
    auto it = entries_.find(indexer_.index_of(high_tuple));
    if (it == entries_.end()) throw MissingEntryError("no argmax entry for the requested separator tuple");
    return it->second;
}

namespace {

struct Summand {
    // Exactly one of constraint/table is set.
    const Constraint* constraint = nullptr;
    const UtilTable* table = nullptr;
    std::vector<std::size_t> positions;  // scope positions inside the combined buffer
    std::size_t ready = 0;               // deepest position; evaluable once it is bound

    Utility eval(std::span<const Value> world, std::vector<Value>& scratch) const {
        scratch.resize(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) scratch[i] = world[positions[i]];
        return constraint ? constraint->evaluate(scratch) : table->lookup(scratch);
    }
};

class LimitCheck {
public:
    explicit LimitCheck(const ComputeLimits& limits) : limits_(limits) {}

    void tick() {
        if (++count_ % 4096 != 0) return;
        if (limits_.cancel && limits_.cancel->load(std::memory_order_relaxed))
            throw CancelledError("compute cancelled");
        if (limits_.deadline && std::chrono::steady_clock::now() > *limits_.deadline)
            throw CancelledError("compute deadline exceeded");
    }

private:
    const ComputeLimits& limits_;
    std::uint64_t count_ = 0;
};

}  // namespace

// One pass over the separator tuples; for each, a depth-first walk of the own
// variables tracking the partial sum of every summand whose scope is already
// fully bound. Enumeration cost is counted as one node per single-variable
// binding, with a full separator tuple costing |high| nodes. The dense and
// sparse strategies always walk the entire own-variable space; rules stops
// extending a prefix the moment its partial sum is neginf, which is sound
// because finite utilities can never lift a neginf sum back up.
ComputeResult compute_util(const DcopInstance& inst, const AgentContext& ctx, Strategy strategy,
                           const ComputeLimits& limits) {
    const std::size_t H = ctx.high_vars.size();
    const std::size_t L = ctx.low_vars.size();

    auto scope_of = [&](VarIndex v) {
        const Variable& var = inst.variable(v);
        return ScopeVar{v, var.low, var.high};
    };

    std::vector<ScopeVar> high_scope;
    for (VarIndex v : ctx.high_vars) high_scope.push_back(scope_of(v));
    std::vector<ScopeVar> combined = high_scope;
    for (VarIndex v : ctx.low_vars) combined.push_back(scope_of(v));

    auto position_of = [&](VarIndex v) {
        for (std::size_t i = 0; i < combined.size(); ++i)
            if (combined[i].var == v) return i;
        throw ScopeMismatchError("summand scope variable " + inst.variable(v).name +
                                 " is neither owned nor in the separator");
    };

    std::vector<Summand> summands;
    for (const Constraint* c : ctx.local_constraints) {
        Summand s;
        s.constraint = c;
        for (VarIndex v : c->scope) s.positions.push_back(position_of(v));
        summands.push_back(std::move(s));
    }
    for (const UtilTable* t : ctx.child_tables) {
        Summand s;
        s.table = t;
        for (const ScopeVar& sv : t->scope()) s.positions.push_back(position_of(sv.var));
        summands.push_back(std::move(s));
    }
    for (Summand& s : summands)
        s.ready = s.positions.empty() ? 0 : *std::max_element(s.positions.begin(), s.positions.end());

    // stage[k]: summands that become evaluable when combined[k] binds; the
    // high stages collapse into one because separator tuples bind atomically.
    std::vector<std::vector<const Summand*>> low_stage(L);
    std::vector<const Summand*> high_stage;
    for (const Summand& s : summands) {
        if (s.positions.empty() || s.ready < H)
            high_stage.push_back(&s);
        else
            low_stage[s.ready - H].push_back(&s);
    }

    ComputeResult result{
        UtilTable(high_scope, strategy == Strategy::Dense ? UtilTable::Repr::Dense : UtilTable::Repr::Sparse),
        ArgmaxCache(high_scope, L),
        0};

    UtilTable high_indexer(high_scope, UtilTable::Repr::Sparse);
    LimitCheck check(limits);

    std::vector<Value> world(combined.size());
    std::vector<Value> scratch;
    std::vector<Value> low_min(L);
    for (std::size_t k = 0; k < L; ++k) low_min[k] = combined[H + k].low;

    Utility best = Utility::neg_inf();
    std::vector<Value> best_low;

    // Depth-first own-variable walk under a fixed separator tuple.
    auto descend = [&](auto&& self, std::size_t k, Utility acc) -> void {
        const ScopeVar& sv = combined[H + k];
        for (Value val = sv.low; val <= sv.high; ++val) {
            ++result.nodes_enumerated;
            check.tick();
            world[H + k] = val;
            Utility sum = acc;
            for (const Summand* s : low_stage[k]) {
                sum += s->eval(world, scratch);
                if (sum.is_neg_inf()) break;
            }
            if (k + 1 == L) {
                if (sum > best) {
                    best = sum;
                    best_low.assign(world.begin() + static_cast<std::ptrdiff_t>(H), world.end());
                }
            } else if (strategy != Strategy::Rules || sum.is_finite()) {
                self(self, k + 1, sum);
            }
        }
    };

    for (std::uint64_t hidx = 0; hidx < high_indexer.domain_product(); ++hidx) {
        high_indexer.tuple_of(hidx, std::span<Value>(world.data(), H));
        result.nodes_enumerated += H;
        check.tick();

        Utility hsum = Utility::finite(0);
        for (const Summand* s : high_stage) {
            hsum += s->eval(world, scratch);
            if (hsum.is_neg_inf()) break;
        }

        best = Utility::neg_inf();
        best_low = low_min;
        if (L == 0) {
            best = hsum;
        } else if (strategy != Strategy::Rules || hsum.is_finite()) {
            descend(descend, 0, hsum);
        }

        if (strategy == Strategy::Dense) {
            result.table.set_index(hidx, best);
            result.cache.record(hidx, best_low, best);
        } else if (best.is_finite()) {
            result.table.set_index(hidx, best);
            result.cache.record(hidx, best_low, best);
        }
    }
    return result;
}

}  // namespace dcop
