#include "dcop/model.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace dcop {

std::string_view rel_op_token(RelOp op) {
    switch (op) {
        case RelOp::Eq: return "=";
        case RelOp::Ne: return "!=";
        case RelOp::Lt: return "<";
        case RelOp::Le: return "<=";
        case RelOp::Gt: return ">";
        case RelOp::Ge: return ">=";
    }
    throw Error("unreachable rel_op_token");
}

std::optional<RelOp> parse_rel_op(std::string_view token) {
    if (token == "=") return RelOp::Eq;
    if (token == "!=") return RelOp::Ne;
    if (token == "<") return RelOp::Lt;
    if (token == "<=") return RelOp::Le;
    if (token == ">") return RelOp::Gt;
    if (token == ">=") return RelOp::Ge;
    return std::nullopt;
}

bool rel_holds(std::int64_t lhs, RelOp op, std::int64_t rhs) {
    switch (op) {
        case RelOp::Eq: return lhs == rhs;
        case RelOp::Ne: return lhs != rhs;
        case RelOp::Lt: return lhs < rhs;
        case RelOp::Le: return lhs <= rhs;
        case RelOp::Gt: return lhs > rhs;
        case RelOp::Ge: return lhs >= rhs;
    }
    throw Error("unreachable rel_holds");
}

namespace {

std::uint64_t flat_index(const Constraint& c, std::span<const Value> values) {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        idx = idx * static_cast<std::uint64_t>(c.scope_card[i]) +
              static_cast<std::uint64_t>(values[i] - c.scope_low[i]);
    }
    return idx;
}

bool tuple_less(const std::vector<Value>& a, const std::vector<Value>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Utility Constraint::evaluate(std::span<const Value> values) const {
    if (values.size() != scope.size()) throw ScopeMismatchError("constraint " + name + ": bad tuple arity");
    if (is_table()) {
        const TableBody& t = table();
        if (!t.flat.empty()) return t.flat[flat_index(*this, values)];
        auto it = std::lower_bound(
            t.rows.begin(), t.rows.end(), values,
            [](const auto& row, std::span<const Value> key) {
                return std::lexicographical_compare(row.first.begin(), row.first.end(), key.begin(), key.end());
            });
        if (it != t.rows.end() && std::equal(it->first.begin(), it->first.end(), values.begin(), values.end()))
            return Utility::finite(it->second);
        return t.default_neg_inf ? Utility::neg_inf() : Utility::finite(0);
    }
    const RuleBody& r = rule();
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::int64_t term;
        if (__builtin_mul_overflow(r.coeffs[i], static_cast<std::int64_t>(values[i]), &term) ||
            __builtin_add_overflow(acc, term, &acc))
            throw OverflowError("rule " + name + ": linear form overflow");
    }
    return rel_holds(acc, r.op, r.bound) ? Utility::finite(r.satisfied_utility) : Utility::neg_inf();
}

AgentIndex DcopInstance::add_agent(std::string name) {
    if (name.empty()) throw SemanticError("agent name may not be empty");
    if (find_agent(name)) throw SemanticError("duplicate agent name: " + name);
    agents_.push_back(std::move(name));
    vars_of_agent_.emplace_back();
    finalized_ = false;
    return static_cast<AgentIndex>(agents_.size() - 1);
}

VarIndex DcopInstance::add_variable(std::string name, AgentIndex owner, Value low, Value high) {
    if (name.empty()) throw SemanticError("variable name may not be empty");
    if (find_variable(name)) throw SemanticError("duplicate variable name: " + name);
    if (owner < 0 || static_cast<std::size_t>(owner) >= agents_.size())
        throw SemanticError("variable " + name + ": unknown owner agent");
    if (low > high) throw SemanticError("variable " + name + ": empty domain");
    variables_.push_back(Variable{std::move(name), owner, low, high});
    VarIndex idx = static_cast<VarIndex>(variables_.size() - 1);
    vars_of_agent_[static_cast<std::size_t>(owner)].push_back(idx);
    finalized_ = false;
    return idx;
}

void DcopInstance::add_table_constraint(std::string name, std::vector<VarIndex> scope, bool default_neg_inf,
                                        std::vector<std::pair<std::vector<Value>, std::int64_t>> rows) {
    if (name.empty()) throw SemanticError("constraint name may not be empty");
    if (find_constraint(name)) throw SemanticError("duplicate constraint name: " + name);
    Constraint c;
    c.name = std::move(name);
    c.scope = std::move(scope);
    TableBody body;
    body.default_neg_inf = default_neg_inf;
    body.rows = std::move(rows);
    c.body = std::move(body);
    constraints_.push_back(std::move(c));
    finalized_ = false;
}

void DcopInstance::add_rule_constraint(std::string name, std::vector<VarIndex> scope,
                                       std::vector<std::int64_t> coeffs, RelOp op, std::int64_t bound,
                                       std::int64_t satisfied_utility) {
    if (name.empty()) throw SemanticError("constraint name may not be empty");
    if (find_constraint(name)) throw SemanticError("duplicate constraint name: " + name);
    Constraint c;
    c.name = std::move(name);
    c.scope = std::move(scope);
    RuleBody body;
    body.coeffs = std::move(coeffs);
    body.op = op;
    body.bound = bound;
    body.satisfied_utility = satisfied_utility;
    c.body = std::move(body);
    constraints_.push_back(std::move(c));
    finalized_ = false;
}

void DcopInstance::finalize() {
    if (finalized_) return;

    // Constraints kept small enough get a direct-indexed lookup array.
    constexpr std::uint64_t kFlatCap = 4096;

    for (Constraint& c : constraints_) {
        if (c.scope.empty()) throw SemanticError("constraint " + c.name + ": empty scope");
        std::set<VarIndex> seen;
        c.scope_low.clear();
        c.scope_card.clear();
        for (VarIndex v : c.scope) {
            if (v < 0 || static_cast<std::size_t>(v) >= variables_.size())
                throw SemanticError("constraint " + c.name + ": unknown variable in scope");
            if (!seen.insert(v).second)
                throw SemanticError("constraint " + c.name + ": repeated variable in scope");
            c.scope_low.push_back(variables_[static_cast<std::size_t>(v)].low);
            c.scope_card.push_back(variables_[static_cast<std::size_t>(v)].domain_size());
        }

        if (c.is_table()) {
            TableBody& t = std::get<TableBody>(c.body);
            for (const auto& [tuple, util] : t.rows) {
                if (tuple.size() != c.scope.size())
                    throw SemanticError("constraint " + c.name + ": row arity mismatch");
                for (std::size_t i = 0; i < tuple.size(); ++i) {
                    const Variable& var = variables_[static_cast<std::size_t>(c.scope[i])];
                    if (tuple[i] < var.low || tuple[i] > var.high)
                        throw SemanticError("constraint " + c.name + ": row value outside domain of " + var.name);
                }
                if (util == std::numeric_limits<std::int64_t>::min())
                    throw SemanticError("constraint " + c.name + ": row utility out of range");
            }
            std::sort(t.rows.begin(), t.rows.end(),
                      [](const auto& a, const auto& b) { return tuple_less(a.first, b.first); });
            for (std::size_t i = 1; i < t.rows.size(); ++i)
                if (t.rows[i - 1].first == t.rows[i].first)
                    throw SemanticError("constraint " + c.name + ": duplicate row tuple");

            std::uint64_t product = 1;
            bool small = true;
            for (std::int64_t card : c.scope_card) {
                if (product > kFlatCap / static_cast<std::uint64_t>(card)) {
                    small = false;
                    break;
                }
                product *= static_cast<std::uint64_t>(card);
            }
            t.flat.clear();
            if (small && product <= kFlatCap) {
                t.flat.assign(product, t.default_neg_inf ? Utility::neg_inf() : Utility::finite(0));
                for (const auto& [tuple, util] : t.rows)
                    t.flat[flat_index(c, tuple)] = Utility::finite(util);
            }
        } else {
            const RuleBody& r = c.rule();
            if (r.coeffs.size() != c.scope.size())
                throw SemanticError("constraint " + c.name + ": coefficient count mismatch");
            if (r.satisfied_utility == std::numeric_limits<std::int64_t>::min())
                throw SemanticError("constraint " + c.name + ": satisfied utility out of range");
        }
    }

    auto rank_of = [](auto size, auto name_at) {
        std::vector<int> order(static_cast<std::size_t>(size));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return name_at(a) < name_at(b); });
        std::vector<int> rank(order.size());
        for (std::size_t r = 0; r < order.size(); ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
        return std::pair(rank, order);
    };

    auto [vr, vo] = rank_of(variables_.size(), [&](int i) -> const std::string& {
        return variables_[static_cast<std::size_t>(i)].name;
    });
    var_rank_ = std::move(vr);
    vars_by_rank_.assign(vo.begin(), vo.end());

    auto [ar, ao] = rank_of(agents_.size(), [&](int i) -> const std::string& {
        return agents_[static_cast<std::size_t>(i)];
    });
    agent_rank_ = std::move(ar);
    agents_by_rank_.assign(ao.begin(), ao.end());

    finalized_ = true;
}

std::optional<AgentIndex> DcopInstance::find_agent(std::string_view name) const {
    for (std::size_t i = 0; i < agents_.size(); ++i)
        if (agents_[i] == name) return static_cast<AgentIndex>(i);
    return std::nullopt;
}

std::optional<VarIndex> DcopInstance::find_variable(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i].name == name) return static_cast<VarIndex>(i);
    return std::nullopt;
}

std::optional<std::size_t> DcopInstance::find_constraint(std::string_view name) const {
    for (std::size_t i = 0; i < constraints_.size(); ++i)
        if (constraints_[i].name == name) return i;
    return std::nullopt;
}

Utility evaluate_constraint(const DcopInstance& inst, const Constraint& c, const Assignment& a) {
    std::vector<Value> values;
    values.reserve(c.scope.size());
    for (VarIndex v : c.scope) {
        if (!a.is_bound(v))
            throw UnboundVariableError("constraint " + c.name + ": variable " + inst.variable(v).name +
                                       " is unbound");
        values.push_back(a.value(v));
    }
    return c.evaluate(values);
}

Utility evaluate(const DcopInstance& inst, const Assignment& a) {
    if (a.size() != inst.num_variables()) throw ScopeMismatchError("assignment sized for a different instance");
    for (std::size_t i = 0; i < inst.num_variables(); ++i) {
        const Variable& var = inst.variable(static_cast<VarIndex>(i));
        if (!a.is_bound(static_cast<VarIndex>(i)))
            throw UnboundVariableError("variable " + var.name + " is unbound");
        Value v = a.value(static_cast<VarIndex>(i));
        if (v < var.low || v > var.high)
            throw OutOfDomainError("variable " + var.name + ": value " + std::to_string(v) + " outside domain");
    }
    Utility total = Utility::finite(0);
    for (const Constraint& c : inst.constraints()) {
        total += evaluate_constraint(inst, c, a);
        if (total.is_neg_inf()) break;  // absorbing
    }
    return total;
}

ConstraintGraph build_constraint_graph(const DcopInstance& inst) {
    if (!inst.finalized()) throw Error("build_constraint_graph: instance not finalized");
    ConstraintGraph g;
    std::set<std::pair<int, int>> var_rank_edges;
    std::set<std::pair<int, int>> agent_rank_edges;
    for (const Constraint& c : inst.constraints()) {
        for (std::size_t i = 0; i < c.scope.size(); ++i) {
            for (std::size_t j = i + 1; j < c.scope.size(); ++j) {
                int ri = inst.var_rank(c.scope[i]);
                int rj = inst.var_rank(c.scope[j]);
                var_rank_edges.insert({std::min(ri, rj), std::max(ri, rj)});
                AgentIndex ai = inst.variable(c.scope[i]).owner;
                AgentIndex aj = inst.variable(c.scope[j]).owner;
                if (ai != aj) {
                    int rai = inst.agent_rank(ai);
                    int raj = inst.agent_rank(aj);
                    agent_rank_edges.insert({std::min(rai, raj), std::max(rai, raj)});
                }
            }
        }
    }
    g.var_adj.resize(inst.num_variables());
    for (auto [ra, rb] : var_rank_edges) {
        VarIndex a = inst.var_by_rank(ra);
        VarIndex b = inst.var_by_rank(rb);
        g.var_edges.emplace_back(a, b);
        g.var_adj[static_cast<std::size_t>(a)].push_back(b);
        g.var_adj[static_cast<std::size_t>(b)].push_back(a);
    }
    g.agent_adj.resize(inst.num_agents());
    for (auto [ra, rb] : agent_rank_edges) {
        AgentIndex a = inst.agent_by_rank(ra);
        AgentIndex b = inst.agent_by_rank(rb);
        g.agent_edges.emplace_back(a, b);
        g.agent_adj[static_cast<std::size_t>(a)].push_back(b);
        g.agent_adj[static_cast<std::size_t>(b)].push_back(a);
    }
    auto by_var_rank = [&](VarIndex a, VarIndex b) { return inst.var_rank(a) < inst.var_rank(b); };
    for (auto& adj : g.var_adj) std::sort(adj.begin(), adj.end(), by_var_rank);
    auto by_agent_rank = [&](AgentIndex a, AgentIndex b) { return inst.agent_rank(a) < inst.agent_rank(b); };
    for (auto& adj : g.agent_adj) std::sort(adj.begin(), adj.end(), by_agent_rank);
    return g;
}

namespace {

// Canonical view of a constraint body with variables identified by name.
struct CanonicalConstraint {
    std::vector<std::string> scope;
    bool is_table = false;
    bool default_neg_inf = false;
    std::vector<std::pair<std::vector<Value>, std::int64_t>> rows;
    std::vector<std::int64_t> coeffs;
    RelOp op = RelOp::Eq;
    std::int64_t bound = 0;
    std::int64_t satisfied_utility = 0;

    bool operator==(const CanonicalConstraint&) const = default;
};

CanonicalConstraint canonical(const DcopInstance& inst, const Constraint& c) {
    CanonicalConstraint out;
    for (VarIndex v : c.scope) out.scope.push_back(inst.variable(v).name);
    out.is_table = c.is_table();
    if (c.is_table()) {
        out.default_neg_inf = c.table().default_neg_inf;
        out.rows = c.table().rows;  // finalize sorted them
    } else {
        const RuleBody& r = c.rule();
        out.coeffs = r.coeffs;
        out.op = r.op;
        out.bound = r.bound;
        out.satisfied_utility = r.satisfied_utility;
    }
    return out;
}

}  // namespace

bool structurally_equal(const DcopInstance& a, const DcopInstance& b) {
    if (a.num_agents() != b.num_agents() || a.num_variables() != b.num_variables() ||
        a.num_constraints() != b.num_constraints())
        return false;

    std::vector<std::string> agents_a(a.agents());
    std::vector<std::string> agents_b(b.agents());
    std::sort(agents_a.begin(), agents_a.end());
    std::sort(agents_b.begin(), agents_b.end());
    if (agents_a != agents_b) return false;

    for (const Variable& va : a.variables()) {
        auto idx = b.find_variable(va.name);
        if (!idx) return false;
        const Variable& vb = b.variable(*idx);
        if (va.low != vb.low || va.high != vb.high) return false;
        if (a.agent_name(va.owner) != b.agent_name(vb.owner)) return false;
    }

    std::map<std::string, CanonicalConstraint> cons_b;
    for (const Constraint& c : b.constraints()) cons_b.emplace(c.name, canonical(b, c));
    for (const Constraint& c : a.constraints()) {
        auto it = cons_b.find(c.name);
        if (it == cons_b.end()) return false;
        if (!(canonical(a, c) == it->second)) return false;
    }
    return true;
}

}  // namespace dcop
