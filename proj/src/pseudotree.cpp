#include "dcop/pseudotree.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dcop {

namespace {

PseudoTree empty_tree(std::size_t n) {
    PseudoTree t;
    t.parent.assign(n, kNoAgent);
    t.children.assign(n, {});
    t.pseudo_parents.assign(n, {});
    t.depth.assign(n, 0);
    return t;
}

void sort_pseudo_parents(const DcopInstance& inst, PseudoTree& t) {
    for (auto& pp : t.pseudo_parents)
        std::sort(pp.begin(), pp.end(),
                  [&](AgentIndex a, AgentIndex b) { return inst.agent_rank(a) < inst.agent_rank(b); });
}

// DFS from root, wiring parents, depths, pseudo-parents and preorder.
void dfs_component(AgentIndex root, const std::vector<std::vector<AgentIndex>>& neighbor_order,
                   std::vector<bool>& visited, PseudoTree& t) {
    std::vector<bool> on_stack(visited.size(), false);
    std::vector<std::pair<AgentIndex, std::size_t>> stack;
    visited[static_cast<std::size_t>(root)] = true;
    on_stack[static_cast<std::size_t>(root)] = true;
    t.preorder.push_back(root);
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
        auto& [cur, idx] = stack.back();
        const auto& order = neighbor_order[static_cast<std::size_t>(cur)];
        if (idx == order.size()) {
            on_stack[static_cast<std::size_t>(cur)] = false;
            stack.pop_back();
            continue;
        }
        AgentIndex b = order[idx++];
        if (!visited[static_cast<std::size_t>(b)]) {
            visited[static_cast<std::size_t>(b)] = true;
            on_stack[static_cast<std::size_t>(b)] = true;
            t.parent[static_cast<std::size_t>(b)] = cur;
            t.depth[static_cast<std::size_t>(b)] = t.depth[static_cast<std::size_t>(cur)] + 1;
            t.children[static_cast<std::size_t>(cur)].push_back(b);
            t.preorder.push_back(b);
            stack.emplace_back(b, 0);
        } else if (on_stack[static_cast<std::size_t>(b)] && b != t.parent[static_cast<std::size_t>(cur)]) {
            t.pseudo_parents[static_cast<std::size_t>(cur)].push_back(b);
        }
    }
}

}  // namespace

PseudoTree build_pseudotree(const DcopInstance& inst, const ConstraintGraph& graph) {
    const std::size_t n = inst.num_agents();
    PseudoTree t = empty_tree(n);

    auto degree = [&](AgentIndex a) { return graph.agent_adj[static_cast<std::size_t>(a)].size(); };

    // Neighbor preference: high degree first, then name rank.
    std::vector<std::vector<AgentIndex>> neighbor_order = graph.agent_adj;
    for (auto& order : neighbor_order)
        std::sort(order.begin(), order.end(), [&](AgentIndex a, AgentIndex b) {
            if (degree(a) != degree(b)) return degree(a) > degree(b);
            return inst.agent_rank(a) < inst.agent_rank(b);
        });

    std::vector<bool> visited(n, false);
    for (std::size_t r = 0; r < n; ++r) {
        AgentIndex start = inst.agent_by_rank(static_cast<int>(r));
        if (visited[static_cast<std::size_t>(start)]) continue;

        // Collect the component, then root it at its highest-degree member.
        std::vector<AgentIndex> members;
        std::vector<AgentIndex> queue{start};
        std::set<AgentIndex> seen{start};
        while (!queue.empty()) {
            AgentIndex a = queue.back();
            queue.pop_back();
            members.push_back(a);
            for (AgentIndex b : graph.agent_adj[static_cast<std::size_t>(a)])
                if (seen.insert(b).second) queue.push_back(b);
        }
        AgentIndex root = members.front();
        for (AgentIndex a : members) {
            if (degree(a) > degree(root) ||
                (degree(a) == degree(root) && inst.agent_rank(a) < inst.agent_rank(root)))
                root = a;
        }
        t.roots.push_back(root);
        dfs_component(root, neighbor_order, visited, t);
    }
    sort_pseudo_parents(inst, t);
    return t;
}

PseudoTree build_pseudotree_from_order(const DcopInstance& inst, const ConstraintGraph& graph,
                                       std::span<const AgentIndex> order) {
    const std::size_t n = inst.num_agents();
    if (order.size() != n) throw NotADfsTraversalError("order must list every agent exactly once");
    std::vector<bool> seen(n, false);
    for (AgentIndex a : order) {
        if (a < 0 || static_cast<std::size_t>(a) >= n || seen[static_cast<std::size_t>(a)])
            throw NotADfsTraversalError("order must list every agent exactly once");
        seen[static_cast<std::size_t>(a)] = true;
    }

    auto adjacent = [&](AgentIndex a, AgentIndex b) {
        const auto& adj = graph.agent_adj[static_cast<std::size_t>(a)];
        return std::find(adj.begin(), adj.end(), b) != adj.end();
    };

    PseudoTree t = empty_tree(n);
    std::vector<AgentIndex> stack;
    for (AgentIndex a : order) {
        while (!stack.empty() && !adjacent(stack.back(), a)) stack.pop_back();
        if (stack.empty()) {
            t.roots.push_back(a);
        } else {
            AgentIndex p = stack.back();
            t.parent[static_cast<std::size_t>(a)] = p;
            t.depth[static_cast<std::size_t>(a)] = t.depth[static_cast<std::size_t>(p)] + 1;
            t.children[static_cast<std::size_t>(p)].push_back(a);
        }
        t.preorder.push_back(a);
        stack.push_back(a);
    }
    for (AgentIndex a : t.preorder) {
        for (AgentIndex b : graph.agent_adj[static_cast<std::size_t>(a)])
            if (b != t.parent[static_cast<std::size_t>(a)] && t.is_ancestor(b, a))
                t.pseudo_parents[static_cast<std::size_t>(a)].push_back(b);
    }
    sort_pseudo_parents(inst, t);

    std::vector<std::string> violations = validate_pseudotree(inst, graph, t);
    if (!violations.empty()) throw NotADfsTraversalError("not a DFS traversal: " + violations.front());
    return t;
}

std::vector<std::string> validate_pseudotree(const DcopInstance& inst, const ConstraintGraph& graph,
                                             const PseudoTree& t) {
    std::vector<std::string> out;
    const std::size_t n = inst.num_agents();
    if (t.parent.size() != n || t.children.size() != n || t.depth.size() != n ||
        t.pseudo_parents.size() != n || t.preorder.size() != n) {
        out.push_back("tree is not sized for the instance");
        return out;
    }

    std::set<std::pair<AgentIndex, AgentIndex>> edges;
    for (auto [a, b] : graph.agent_edges) {
        edges.insert({a, b});
        edges.insert({b, a});
    }

    std::set<AgentIndex> seen;
    for (AgentIndex a : t.preorder) {
        if (!seen.insert(a).second) out.push_back("agent " + inst.agent_name(a) + " visited twice");
    }
    if (seen.size() != n) out.push_back("preorder does not cover every agent");

    for (std::size_t i = 0; i < n; ++i) {
        AgentIndex a = static_cast<AgentIndex>(i);
        AgentIndex p = t.parent[i];
        if (p == kNoAgent) {
            if (t.depth[i] != 0) out.push_back("root " + inst.agent_name(a) + " has nonzero depth");
            if (std::find(t.roots.begin(), t.roots.end(), a) == t.roots.end())
                out.push_back("parentless agent " + inst.agent_name(a) + " missing from roots");
            continue;
        }
        if (!edges.count({p, a}))
            out.push_back("tree edge (" + inst.agent_name(p) + ", " + inst.agent_name(a) +
                          ") is backed by no constraint");
        if (t.depth[i] != t.depth[static_cast<std::size_t>(p)] + 1)
            out.push_back("depth of " + inst.agent_name(a) + " disagrees with its parent");
        const auto& sibs = t.children[static_cast<std::size_t>(p)];
        if (std::count(sibs.begin(), sibs.end(), a) != 1)
            out.push_back("agent " + inst.agent_name(a) + " missing from its parent's children");
    }

    for (auto [a, b] : graph.agent_edges) {
        if (!t.is_ancestor(a, b) && !t.is_ancestor(b, a))
            out.push_back("constrained agents " + inst.agent_name(a) + " and " + inst.agent_name(b) +
                          " sit on different branches");
    }

    for (std::size_t i = 0; i < n; ++i) {
        AgentIndex a = static_cast<AgentIndex>(i);
        std::vector<AgentIndex> expected;
        for (AgentIndex b : graph.agent_adj[i])
            if (b != t.parent[i] && t.is_ancestor(b, a)) expected.push_back(b);
        std::vector<AgentIndex> got = t.pseudo_parents[i];
        auto by_rank = [&](AgentIndex x, AgentIndex y) { return inst.agent_rank(x) < inst.agent_rank(y); };
        std::sort(expected.begin(), expected.end(), by_rank);
        std::sort(got.begin(), got.end(), by_rank);
        if (expected != got)
            out.push_back("pseudo-parents of " + inst.agent_name(a) + " are inconsistent with the graph");
    }
    return out;
}

SeparatorSet compute_separators(const DcopInstance& inst, const ConstraintGraph& graph,
                                const PseudoTree& t) {
    const std::size_t n = inst.num_agents();
    std::vector<std::set<VarIndex>> acc(n);

    // Direct links: ancestor-owned variables constrained with the agent's own.
    for (auto [u, v] : graph.var_edges) {
        AgentIndex p = inst.variable(u).owner;
        AgentIndex q = inst.variable(v).owner;
        if (p == q) continue;
        if (t.is_ancestor(p, q)) acc[static_cast<std::size_t>(q)].insert(u);
        if (t.is_ancestor(q, p)) acc[static_cast<std::size_t>(p)].insert(v);
    }

    // Children first: fold child separators upward, dropping own variables.
    for (auto it = t.preorder.rbegin(); it != t.preorder.rend(); ++it) {
        AgentIndex a = *it;
        AgentIndex p = t.parent[static_cast<std::size_t>(a)];
        if (p == kNoAgent) continue;
        for (VarIndex v : acc[static_cast<std::size_t>(a)])
            if (inst.variable(v).owner != p) acc[static_cast<std::size_t>(p)].insert(v);
    }

    SeparatorSet seps;
    seps.per_agent.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<VarIndex> vars(acc[i].begin(), acc[i].end());
        std::sort(vars.begin(), vars.end(), [&](VarIndex a, VarIndex b) {
            int da = t.depth[static_cast<std::size_t>(inst.variable(a).owner)];
            int db = t.depth[static_cast<std::size_t>(inst.variable(b).owner)];
            if (da != db) return da < db;
            return inst.var_rank(a) < inst.var_rank(b);
        });
        seps.per_agent[i] = std::move(vars);
    }
    return seps;
}

int induced_width(const SeparatorSet& seps) {
    std::size_t w = 0;
    for (const auto& s : seps.per_agent) w = std::max(w, s.size());
    return static_cast<int>(w);
}

std::string dump_tree(const DcopInstance& inst, const PseudoTree& t, const SeparatorSet& seps) {
    std::ostringstream os;
    for (std::size_t r = 0; r < inst.num_agents(); ++r) {
        AgentIndex a = inst.agent_by_rank(static_cast<int>(r));
        os << inst.agent_name(a) << " parent=";
        AgentIndex p = t.parent[static_cast<std::size_t>(a)];
        os << (p == kNoAgent ? "-" : inst.agent_name(p));
        os << " pseudo=[";
        const auto& pp = t.pseudo_parents[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < pp.size(); ++i) os << (i ? "," : "") << inst.agent_name(pp[i]);
        os << "] sep=[";
        const auto& sep = seps.per_agent[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < sep.size(); ++i) os << (i ? "," : "") << inst.variable(sep[i]).name;
        os << "] depth=" << t.depth[static_cast<std::size_t>(a)] << "\n";
    }
    return os.str();
}

}  // namespace dcop
