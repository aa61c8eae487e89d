#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dcop/model.hpp"
#include "dcop/table.hpp"

namespace dcop {

// How an agent materializes its outgoing UTIL table.
//
//   dense   enumerate everything, emit every row including neginf ones
//   sparse  enumerate everything, emit only the finite rows
//   rules   emit only the finite rows and additionally prune the enumeration:
//           every summand is checked as soon as its scope is bound, and a
//           neginf prefix is never extended
//
// All three denote the same function; they differ in row counts sent and in
// enumeration work.
enum class Strategy { Dense, Sparse, Rules };

std::string_view strategy_token(Strategy s);
Strategy parse_strategy(std::string_view token);  // throws InvalidParamsError

// Everything one agent needs for its UTIL step. high_vars is the separator
// (ancestor-owned, fixed per row), low_vars are the agent's own variables
// (projected out). Child tables are the UTIL tables received from children;
// their scopes must lie inside high + low.
struct AgentContext {
    AgentIndex agent = kNoAgent;
    std::vector<VarIndex> low_vars;
    std::vector<VarIndex> high_vars;
    std::vector<const Constraint*> local_constraints;
    std::vector<const UtilTable*> child_tables;
};

// Best own-variable completion per separator tuple, recorded during the UTIL
// step and consulted during the VALUE step.
class ArgmaxCache {
public:
    ArgmaxCache() = default;
    ArgmaxCache(std::vector<ScopeVar> high_scope, std::size_t low_arity);

    const std::vector<ScopeVar>& high_scope() const noexcept { return high_scope_; }

    void record(std::uint64_t high_index, std::vector<Value> low_tuple, Utility utility);

    struct Entry {
        std::vector<Value> low_tuple;
        Utility utility;
    };

    // Throws MissingEntryError when the tuple was never recorded.
    const Entry& lookup(std::span<const Value> high_tuple) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<ScopeVar> high_scope_;
    std::size_t low_arity_ = 0;
    UtilTable indexer_;  // reused purely for mixed-radix indexing
    std::unordered_map<std::uint64_t, Entry> entries_;
};

struct ComputeLimits {
    const std::atomic<bool>* cancel = nullptr;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct ComputeResult {
    UtilTable table;
    ArgmaxCache cache;
    // Enumeration nodes: one per single-variable binding attempted. This is
    // the deterministic cost proxy for simulated time.
    std::uint64_t nodes_enumerated = 0;
};

// Joins the child tables and local constraints over high + low and projects
// the low variables out by maximization. Ties take the lexicographically
// smallest low tuple. Throws CancelledError when limits trip mid-run.
ComputeResult compute_util(const DcopInstance& inst, const AgentContext& ctx, Strategy strategy,
                           const ComputeLimits& limits = {});

}  // namespace dcop
