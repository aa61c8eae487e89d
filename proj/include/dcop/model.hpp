#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dcop/errors.hpp"
#include "dcop/utility.hpp"

namespace dcop {

using VarIndex = std::int32_t;
using AgentIndex = std::int32_t;
using Value = std::int32_t;

inline constexpr VarIndex kNoVar = -1;
inline constexpr AgentIndex kNoAgent = -1;

struct Variable {
    std::string name;
    AgentIndex owner = kNoAgent;
    Value low = 0;
    Value high = 0;

    std::int64_t domain_size() const noexcept {
        return static_cast<std::int64_t>(high) - static_cast<std::int64_t>(low) + 1;
    }
};

// Explicit utility rows over the scope's value tuples. Tuples absent from
// rows take the default: 0 or negative infinity. Rows are kept sorted by
// tuple so lookup is a binary search; small tables are additionally
// flattened into a direct-indexed array at finalize time.
struct TableBody {
    bool default_neg_inf = false;
    std::vector<std::pair<std::vector<Value>, std::int64_t>> rows;

    std::vector<Utility> flat;  // built by DcopInstance::finalize when the domain product is small
};

enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view rel_op_token(RelOp op);
std::optional<RelOp> parse_rel_op(std::string_view token);
bool rel_holds(std::int64_t lhs, RelOp op, std::int64_t rhs);

// Linear hard rule: sum(coeffs[i] * scope[i]) <op> bound. A satisfying tuple
// is worth satisfied_utility, any other tuple is worth negative infinity.
struct RuleBody {
    std::vector<std::int64_t> coeffs;  // parallel to the constraint scope
    RelOp op = RelOp::Eq;
    std::int64_t bound = 0;
    std::int64_t satisfied_utility = 0;
};

struct Constraint {
    std::string name;
    std::vector<VarIndex> scope;  // arity >= 1, no repeats
    std::variant<TableBody, RuleBody> body;

    // Filled by DcopInstance::finalize.
    std::vector<Value> scope_low;
    std::vector<std::int64_t> scope_card;

    bool is_table() const noexcept { return std::holds_alternative<TableBody>(body); }
    const TableBody& table() const { return std::get<TableBody>(body); }
    const RuleBody& rule() const { return std::get<RuleBody>(body); }

    // Scope values in scope order; every value must be in its domain.
    Utility evaluate(std::span<const Value> values) const;
};

class DcopInstance {
public:
    const std::string& name() const noexcept { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    AgentIndex add_agent(std::string name);
    VarIndex add_variable(std::string name, AgentIndex owner, Value low, Value high);
    void add_table_constraint(std::string name, std::vector<VarIndex> scope, bool default_neg_inf,
                              std::vector<std::pair<std::vector<Value>, std::int64_t>> rows);
    void add_rule_constraint(std::string name, std::vector<VarIndex> scope,
                             std::vector<std::int64_t> coeffs, RelOp op, std::int64_t bound,
                             std::int64_t satisfied_utility);

    // Cross-checks every invariant, sorts table rows, builds name ranks and
    // flat lookup tables. Must be called once construction is complete;
    // throws SemanticError on any breach.
    void finalize();
    bool finalized() const noexcept { return finalized_; }

    std::size_t num_agents() const noexcept { return agents_.size(); }
    std::size_t num_variables() const noexcept { return variables_.size(); }
    std::size_t num_constraints() const noexcept { return constraints_.size(); }

    const std::string& agent_name(AgentIndex a) const { return agents_.at(static_cast<std::size_t>(a)); }
    const Variable& variable(VarIndex v) const { return variables_.at(static_cast<std::size_t>(v)); }
    const Constraint& constraint(std::size_t i) const { return constraints_.at(i); }
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::vector<std::string>& agents() const noexcept { return agents_; }

    std::optional<AgentIndex> find_agent(std::string_view name) const;
    std::optional<VarIndex> find_variable(std::string_view name) const;
    std::optional<std::size_t> find_constraint(std::string_view name) const;

    // Owned variables in declaration order.
    const std::vector<VarIndex>& variables_of(AgentIndex a) const {
        return vars_of_agent_.at(static_cast<std::size_t>(a));
    }

    // Position in the name-sorted order; available after finalize.
    int var_rank(VarIndex v) const { return var_rank_.at(static_cast<std::size_t>(v)); }
    int agent_rank(AgentIndex a) const { return agent_rank_.at(static_cast<std::size_t>(a)); }
    VarIndex var_by_rank(int r) const { return vars_by_rank_.at(static_cast<std::size_t>(r)); }
    AgentIndex agent_by_rank(int r) const { return agents_by_rank_.at(static_cast<std::size_t>(r)); }

private:
    std::string name_;
    std::vector<std::string> agents_;
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<std::vector<VarIndex>> vars_of_agent_;
    std::vector<int> var_rank_;
    std::vector<int> agent_rank_;
    std::vector<VarIndex> vars_by_rank_;
    std::vector<AgentIndex> agents_by_rank_;
    bool finalized_ = false;
};

// Partial mapping from variables to values.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(std::size_t num_vars) : values_(num_vars) {}

    std::size_t size() const noexcept { return values_.size(); }

    void bind(VarIndex v, Value val) { values_.at(static_cast<std::size_t>(v)) = val; }
    void unbind(VarIndex v) { values_.at(static_cast<std::size_t>(v)).reset(); }
    bool is_bound(VarIndex v) const { return values_.at(static_cast<std::size_t>(v)).has_value(); }

    Value value(VarIndex v) const {
        const auto& slot = values_.at(static_cast<std::size_t>(v));
        if (!slot) throw UnboundVariableError("variable #" + std::to_string(v) + " is unbound");
        return *slot;
    }

    std::optional<Value> get(VarIndex v) const { return values_.at(static_cast<std::size_t>(v)); }

    bool is_total() const noexcept {
        for (const auto& s : values_)
            if (!s) return false;
        return true;
    }

    std::size_t bound_count() const noexcept {
        std::size_t n = 0;
        for (const auto& s : values_)
            if (s) ++n;
        return n;
    }

    friend bool operator==(const Assignment& a, const Assignment& b) { return a.values_ == b.values_; }

private:
    std::vector<std::optional<Value>> values_;
};

// Sum of all constraint utilities under a total assignment. Throws
// UnboundVariableError on any unbound variable and OutOfDomainError on any
// binding outside its domain.
Utility evaluate(const DcopInstance& inst, const Assignment& a);

// Single constraint under a (possibly partial) assignment that binds its scope.
Utility evaluate_constraint(const DcopInstance& inst, const Constraint& c, const Assignment& a);

// A constraint bound to positions inside a caller-owned value buffer, so the
// hot loops can evaluate without going through an Assignment. `positions[i]`
// locates scope[i] inside the span handed to eval().
struct BoundConstraint {
    const Constraint* constraint = nullptr;
    std::vector<int> positions;

    Utility eval(std::span<const Value> world) const {
        scratch_.resize(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i)
            scratch_[i] = world[static_cast<std::size_t>(positions[i])];
        return constraint->evaluate(scratch_);
    }

private:
    mutable std::vector<Value> scratch_;
};

struct ConstraintGraph {
    // Undirected, deduplicated, name-rank canonical: for every edge the
    // lower-ranked endpoint comes first and the lists are sorted by rank.
    std::vector<std::pair<VarIndex, VarIndex>> var_edges;
    std::vector<std::pair<AgentIndex, AgentIndex>> agent_edges;
    std::vector<std::vector<VarIndex>> var_adj;      // per variable, sorted by rank
    std::vector<std::vector<AgentIndex>> agent_adj;  // per agent, sorted by rank
};

ConstraintGraph build_constraint_graph(const DcopInstance& inst);

// Equality up to declaration order: same entity names, domains, ownership,
// constraint bodies and (for tables) the same row sets.
bool structurally_equal(const DcopInstance& a, const DcopInstance& b);

}  // namespace dcop
