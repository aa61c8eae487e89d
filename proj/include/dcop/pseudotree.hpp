#pragma once

#include <span>
#include <string>
#include <vector>

#include "dcop/model.hpp"

namespace dcop {

// DFS pseudo-tree over the agent graph. Tree edges are backed by constraint
// edges, every constrained pair of agents sits on one root path, and each
// connected component gets its own root, so disconnected instances yield a
// forest.
struct PseudoTree {
    std::vector<AgentIndex> roots;                        // one per component, in discovery order
    std::vector<AgentIndex> parent;                       // kNoAgent at roots
    std::vector<std::vector<AgentIndex>> children;        // in DFS visit order
    std::vector<std::vector<AgentIndex>> pseudo_parents;  // non-tree ancestors, sorted by name rank
    std::vector<int> depth;                               // roots at 0
    std::vector<AgentIndex> preorder;                     // parents before children, all components

    bool is_root(AgentIndex a) const { return parent[static_cast<std::size_t>(a)] == kNoAgent; }

    // Strict: is_ancestor(a, a) is false.
    bool is_ancestor(AgentIndex anc, AgentIndex node) const {
        int target = depth[static_cast<std::size_t>(anc)];
        AgentIndex cur = node;
        while (cur != kNoAgent && depth[static_cast<std::size_t>(cur)] > target)
            cur = parent[static_cast<std::size_t>(cur)];
        return cur == anc && node != anc;
    }
};

// Heuristic construction: per component the root is a maximum-degree agent
// and DFS prefers high-degree neighbors; all ties break on name rank.
PseudoTree build_pseudotree(const DcopInstance& inst, const ConstraintGraph& graph);

// Rebuild the tree a given DFS visit order describes: each agent attaches to
// the nearest stack ancestor it shares a constraint with, starting a new
// component when there is none. Throws NotADfsTraversalError if the order is
// not a permutation of the agents or the result fails validation.
PseudoTree build_pseudotree_from_order(const DcopInstance& inst, const ConstraintGraph& graph,
                                       std::span<const AgentIndex> order);

// Empty means valid; otherwise one human-readable line per breached property.
std::vector<std::string> validate_pseudotree(const DcopInstance& inst, const ConstraintGraph& graph,
                                             const PseudoTree& tree);

// sep(a): variables owned by strict ancestors of a that are constrained with
// variables inside a's subtree. Ordered by owner depth, then variable rank.
struct SeparatorSet {
    std::vector<std::vector<VarIndex>> per_agent;
};

SeparatorSet compute_separators(const DcopInstance& inst, const ConstraintGraph& graph,
                                const PseudoTree& tree);

// Largest separator size; the DPOP memory exponent.
int induced_width(const SeparatorSet& seps);

// One line per agent in name order:
//   <agent> parent=<name|-> pseudo=[..] sep=[..] depth=<d>
std::string dump_tree(const DcopInstance& inst, const PseudoTree& tree, const SeparatorSet& seps);

}  // namespace dcop
