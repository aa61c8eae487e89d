#pragma once

#include <cstdint>
#include <optional>

#include "dcop/model.hpp"

namespace dcop {

struct OracleResult {
    Utility utility = Utility::neg_inf();  // neginf when no finite assignment exists
    std::optional<Assignment> assignment;  // absent exactly when infeasible
};

// Exhaustive scan of the full assignment space, independent of every solver
// code path: no tables, no tree, no projection. Variables enumerate in name
// order, so ties resolve to the lexicographically smallest maximizer over the
// name-ordered value tuple. Throws InstanceTooLargeError when the space
// exceeds max_assignments.
OracleResult brute_force(const DcopInstance& inst, std::uint64_t max_assignments = 10'000'000);

// Number of assignments with finite total utility, same cap semantics.
std::uint64_t count_feasible(const DcopInstance& inst, std::uint64_t max_assignments = 10'000'000);

}  // namespace dcop
