#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dcop/model.hpp"
#include "dcop/pseudotree.hpp"
#include "dcop/solver.hpp"

namespace dcop {

enum class SchedulerKind {
    Sequential,  // one thread, agents stepped in dependency order
    Threaded     // one thread per agent, blocking receives
};

// Deterministic charges one simulated nanosecond per enumeration node and
// zero for VALUE processing, so reports are bit-identical across schedulers
// and machines. Measured charges real compute time.
enum class CostMode { Measured, Deterministic };

enum class SolveStatus { Optimal, Infeasible, Timeout };

std::string_view status_token(SolveStatus s);
std::string_view scheduler_token(SchedulerKind s);
SchedulerKind parse_scheduler(std::string_view token);  // throws InvalidParamsError

struct SolveOptions {
    Strategy strategy = Strategy::Sparse;
    SchedulerKind scheduler = SchedulerKind::Threaded;
    CostMode cost_mode = CostMode::Measured;
    double timeout_seconds = 600.0;  // <= 0 disables the deadline
    std::int64_t latency_ns = 0;     // added to every message hop
    bool collect_trace = false;
    const PseudoTree* pinned_tree = nullptr;  // overrides the heuristic tree
};

struct SolveMetrics {
    std::int64_t util_messages = 0;
    std::int64_t value_messages = 0;
    std::int64_t total_rows_sent = 0;   // rows across all UTIL payloads
    std::int64_t max_table_rows = 0;    // largest single UTIL table
    int induced_width = 0;
    int components = 0;
    std::uint64_t nodes_enumerated = 0;
    std::int64_t simulated_runtime_ns = 0;  // max final agent clock
    std::int64_t wall_time_ns = 0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::Infeasible;
    Utility utility = Utility::neg_inf();
    Assignment assignment;  // total exactly when status is Optimal
    SolveMetrics metrics;
    std::vector<std::string> trace;  // only when collect_trace
};

// Runs the full protocol: UTIL up the pseudo-tree, VALUE (or HALT) down.
// Optimal reports carry a total assignment whose evaluation equals the
// reported utility; Infeasible means some component has no finite assignment.
SolveReport solve(const DcopInstance& inst, const SolveOptions& opts = {});

// Key=value lines. With deterministic=true the wall time is reported as zero
// so two runs of the same instance compare byte for byte.
std::string format_report(const DcopInstance& inst, const SolveReport& report, bool deterministic);

}  // namespace dcop
