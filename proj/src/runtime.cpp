#include "dcop/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "dcop/transport.hpp"

namespace dcop {

std::string_view status_token(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::Timeout: return "Timeout";
    }
    throw Error("unreachable status_token");
}

std::string_view scheduler_token(SchedulerKind s) {
    switch (s) {
        case SchedulerKind::Sequential: return "seq";
        case SchedulerKind::Threaded: return "threads";
    }
    throw Error("unreachable scheduler_token");
}

SchedulerKind parse_scheduler(std::string_view token) {
    if (token == "seq") return SchedulerKind::Sequential;
    if (token == "threads") return SchedulerKind::Threaded;
    throw InvalidParamsError("unknown scheduler: " + std::string(token));
}

namespace {

using Clock = std::chrono::steady_clock;

struct TraceEvent {
    DpopMessage::Kind kind;
    AgentIndex from;
    AgentIndex to;
    std::int64_t clk;
    std::uint64_t rows = 0;                            // UTIL only
    std::vector<std::pair<VarIndex, Value>> bindings;  // VALUE only
};

struct AgentRun {
    AgentIndex id = kNoAgent;
    std::int64_t clock = 0;
    std::vector<std::pair<AgentIndex, UtilTable>> child_tables;
    std::optional<ArgmaxCache> cache;
    Utility root_best = Utility::neg_inf();
    std::vector<Value> own_values;  // parallel to the agent's variable list
    std::map<VarIndex, Value> sep_values;
    std::uint64_t nodes = 0;
    std::uint64_t table_rows = 0;
    bool value_done = false;
    bool halted = false;
    std::vector<TraceEvent> events;
};

struct Driver {
    const DcopInstance& inst;
    const SolveOptions& opts;
    const PseudoTree& tree;
    const SeparatorSet& seps;
    InProcTransport& transport;
    ComputeLimits limits;
    std::vector<std::vector<const Constraint*>> agent_constraints;
    std::vector<AgentRun> runs;

    std::int64_t merged_clock(std::int64_t own, std::int64_t send_clock) const {
        return std::max(own, send_clock + opts.latency_ns);
    }

    void step_util(AgentRun& me) {
        const auto& children = tree.children[static_cast<std::size_t>(me.id)];
        std::vector<bool> pending(inst.num_agents(), false);
        for (AgentIndex c : children) pending[static_cast<std::size_t>(c)] = true;
        for (std::size_t got = 0; got < children.size(); ++got) {
            DpopMessage msg = transport.receive(me.id);
            if (msg.kind != DpopMessage::Kind::Util || !pending[static_cast<std::size_t>(msg.from)])
                throw ProtocolViolationError("unexpected message while waiting for child tables");
            pending[static_cast<std::size_t>(msg.from)] = false;
            me.clock = merged_clock(me.clock, msg.send_clock);
            me.child_tables.emplace_back(msg.from, std::move(std::get<UtilPayload>(msg.payload).table));
        }
        // Arrival order is nondeterministic under the threaded scheduler.
        std::sort(me.child_tables.begin(), me.child_tables.end(), [&](const auto& a, const auto& b) {
            return inst.agent_rank(a.first) < inst.agent_rank(b.first);
        });

        AgentContext ctx;
        ctx.agent = me.id;
        ctx.low_vars = inst.variables_of(me.id);
        ctx.high_vars = seps.per_agent[static_cast<std::size_t>(me.id)];
        ctx.local_constraints = agent_constraints[static_cast<std::size_t>(me.id)];
        for (const auto& [child, table] : me.child_tables) ctx.child_tables.push_back(&table);

        Clock::time_point t0 = Clock::now();
        ComputeResult result = compute_util(inst, ctx, opts.strategy, limits);
        std::int64_t cost =
            opts.cost_mode == CostMode::Deterministic
                ? static_cast<std::int64_t>(result.nodes_enumerated)
                : std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();

        me.clock += cost;
        me.nodes = result.nodes_enumerated;
        me.table_rows = result.table.row_count();
        me.cache = std::move(result.cache);

        if (tree.is_root(me.id)) {
            me.root_best = result.table.lookup_index(0);
            return;
        }
        AgentIndex parent = tree.parent[static_cast<std::size_t>(me.id)];
        if (opts.collect_trace)
            me.events.push_back(TraceEvent{DpopMessage::Kind::Util, me.id, parent, me.clock,
                                           result.table.row_count(), {}});
        transport.send(DpopMessage{DpopMessage::Kind::Util, me.id, parent, me.clock,
                                   UtilPayload{std::move(result.table)}});
    }

    std::vector<std::pair<VarIndex, Value>> bindings_for(const AgentRun& me, AgentIndex child) const {
        std::vector<std::pair<VarIndex, Value>> out;
        const auto& own = inst.variables_of(me.id);
        for (VarIndex v : seps.per_agent[static_cast<std::size_t>(child)]) {
            if (inst.variable(v).owner == me.id) {
                auto it = std::find(own.begin(), own.end(), v);
                out.emplace_back(v, me.own_values[static_cast<std::size_t>(it - own.begin())]);
            } else {
                auto it = me.sep_values.find(v);
                if (it == me.sep_values.end())
                    throw ProtocolViolationError("child separator variable " + inst.variable(v).name +
                                                 " is not bound at its parent");
                out.emplace_back(v, it->second);
            }
        }
        return out;
    }

    void send_value_down(AgentRun& me) {
        for (AgentIndex child : tree.children[static_cast<std::size_t>(me.id)]) {
            auto bindings = bindings_for(me, child);
            if (opts.collect_trace)
                me.events.push_back(
                    TraceEvent{DpopMessage::Kind::Value, me.id, child, me.clock, 0, bindings});
            transport.send(DpopMessage{DpopMessage::Kind::Value, me.id, child, me.clock,
                                       ValuePayload{std::move(bindings)}});
        }
    }

    void send_halt_down(AgentRun& me) {
        for (AgentIndex child : tree.children[static_cast<std::size_t>(me.id)]) {
            if (opts.collect_trace)
                me.events.push_back(TraceEvent{DpopMessage::Kind::Halt, me.id, child, me.clock, 0, {}});
            transport.send(DpopMessage{DpopMessage::Kind::Halt, me.id, child, me.clock, HaltPayload{}});
        }
    }

    void bind_own(AgentRun& me, std::span<const Value> high_tuple) {
        Clock::time_point t0 = Clock::now();
        const ArgmaxCache::Entry& entry = me.cache->lookup(high_tuple);
        me.own_values = entry.low_tuple;
        if (opts.cost_mode == CostMode::Measured)
            me.clock += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
    }

    void step_value(AgentRun& me) {
        const auto& sep = seps.per_agent[static_cast<std::size_t>(me.id)];
        if (tree.is_root(me.id)) {
            if (me.root_best.is_neg_inf()) {
                me.halted = true;
                send_halt_down(me);
            } else {
                bind_own(me, {});
                send_value_down(me);
            }
            me.value_done = true;
            return;
        }

        DpopMessage msg = transport.receive(me.id);
        if (msg.from != tree.parent[static_cast<std::size_t>(me.id)])
            throw ProtocolViolationError("value-phase message from a non-parent");
        me.clock = merged_clock(me.clock, msg.send_clock);

        if (msg.kind == DpopMessage::Kind::Halt) {
            me.halted = true;
            send_halt_down(me);
            me.value_done = true;
            return;
        }
        if (msg.kind != DpopMessage::Kind::Value)
            throw ProtocolViolationError("unexpected message kind in the value phase");

        const auto& bindings = std::get<ValuePayload>(msg.payload).bindings;
        if (bindings.size() != sep.size())
            throw ProtocolViolationError("separator binding count mismatch");
        for (const auto& [var, val] : bindings) me.sep_values[var] = val;

        std::vector<Value> high_tuple;
        high_tuple.reserve(sep.size());
        for (VarIndex v : sep) {
            auto it = me.sep_values.find(v);
            if (it == me.sep_values.end())
                throw ProtocolViolationError("separator variable " + inst.variable(v).name + " left unbound");
            high_tuple.push_back(it->second);
        }
        bind_own(me, high_tuple);
        send_value_down(me);
        me.value_done = true;
    }
};

std::string format_bindings(const DcopInstance& inst, const std::vector<std::pair<VarIndex, Value>>& bs) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < bs.size(); ++i)
        os << (i ? "," : "") << inst.variable(bs[i].first).name << "=" << bs[i].second;
    os << "]";
    return os.str();
}

std::vector<std::string> render_trace(const DcopInstance& inst, const PseudoTree& tree,
                                      const SeparatorSet& seps, std::vector<TraceEvent> events) {
    // Canonical order: UTIL first, deepest senders first; then VALUE and HALT
    // shallowest first. Ties on name rank.
    auto key = [&](const TraceEvent& e) {
        int phase = e.kind == DpopMessage::Kind::Util ? 0 : 1;
        int d = tree.depth[static_cast<std::size_t>(e.from)];
        return std::tuple(phase, phase == 0 ? -d : d, inst.agent_rank(e.from), inst.agent_rank(e.to));
    };
    std::sort(events.begin(), events.end(),
              [&](const TraceEvent& a, const TraceEvent& b) { return key(a) < key(b); });

    std::vector<std::string> out;
    for (const TraceEvent& e : events) {
        std::ostringstream os;
        switch (e.kind) {
            case DpopMessage::Kind::Util: {
                os << "UTIL from=" << inst.agent_name(e.from) << " to=" << inst.agent_name(e.to)
                   << " clk=" << e.clk << " scope=[";
                const auto& sep = seps.per_agent[static_cast<std::size_t>(e.from)];
                for (std::size_t i = 0; i < sep.size(); ++i)
                    os << (i ? "," : "") << inst.variable(sep[i]).name;
                os << "] rows=" << e.rows;
                break;
            }
            case DpopMessage::Kind::Value:
                os << "VALUE from=" << inst.agent_name(e.from) << " to=" << inst.agent_name(e.to)
                   << " clk=" << e.clk << " bind=" << format_bindings(inst, e.bindings);
                break;
            case DpopMessage::Kind::Halt:
                os << "HALT from=" << inst.agent_name(e.from) << " to=" << inst.agent_name(e.to)
                   << " clk=" << e.clk;
                break;
        }
        out.push_back(os.str());
    }
    return out;
}

// Constraints are computed exactly once, at the deepest agent owning a scope
// variable. A valid pseudo-tree puts all owners of one constraint on a single
// root path, so the deepest owner is unique.
std::vector<std::vector<const Constraint*>> assign_constraints(const DcopInstance& inst,
                                                               const PseudoTree& tree) {
    std::vector<std::vector<const Constraint*>> out(inst.num_agents());
    for (const Constraint& c : inst.constraints()) {
        AgentIndex deepest = inst.variable(c.scope.front()).owner;
        for (VarIndex v : c.scope) {
            AgentIndex a = inst.variable(v).owner;
            if (tree.depth[static_cast<std::size_t>(a)] > tree.depth[static_cast<std::size_t>(deepest)])
                deepest = a;
        }
        out[static_cast<std::size_t>(deepest)].push_back(&c);
    }
    return out;
}

}  // namespace

SolveReport solve(const DcopInstance& inst, const SolveOptions& opts) {
    if (!inst.finalized()) throw Error("solve: instance not finalized");
    Clock::time_point wall0 = Clock::now();

    ConstraintGraph graph = build_constraint_graph(inst);
    PseudoTree local_tree;
    const PseudoTree* tree = opts.pinned_tree;
    if (tree) {
        auto violations = validate_pseudotree(inst, graph, *tree);
        if (!violations.empty()) throw InvalidParamsError("pinned pseudo-tree invalid: " + violations.front());
    } else {
        local_tree = build_pseudotree(inst, graph);
        tree = &local_tree;
    }
    SeparatorSet seps = compute_separators(inst, graph, *tree);

    const std::size_t n = inst.num_agents();
    const bool threaded = opts.scheduler == SchedulerKind::Threaded;
    InProcTransport transport(n, threaded);

    std::atomic<bool> cancel{false};
    ComputeLimits limits;
    limits.cancel = &cancel;
    std::optional<Clock::time_point> deadline;
    if (opts.timeout_seconds > 0) {
        deadline = wall0 + std::chrono::nanoseconds(
                               static_cast<std::int64_t>(opts.timeout_seconds * 1e9));
        limits.deadline = deadline;
    }

    Driver driver{inst, opts, *tree, seps, transport, limits, assign_constraints(inst, *tree), {}};
    driver.runs.resize(n);
    for (std::size_t i = 0; i < n; ++i) driver.runs[i].id = static_cast<AgentIndex>(i);

    // UTIL strictly deepest-first, VALUE shallowest-first; ties on name rank.
    auto depth_order = [&](bool deepest_first) {
        std::vector<AgentIndex> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](AgentIndex a, AgentIndex b) {
            int da = tree->depth[static_cast<std::size_t>(a)];
            int db = tree->depth[static_cast<std::size_t>(b)];
            if (da != db) return deepest_first ? da > db : da < db;
            return inst.agent_rank(a) < inst.agent_rank(b);
        });
        return order;
    };
    std::vector<AgentIndex> util_order = depth_order(true);
    std::vector<AgentIndex> value_order = depth_order(false);

    bool timed_out = false;
    if (!threaded) {
        try {
            auto check_deadline = [&] {
                if (deadline && Clock::now() > *deadline) throw CancelledError("deadline");
            };
            for (AgentIndex a : util_order) {
                check_deadline();
                driver.step_util(driver.runs[static_cast<std::size_t>(a)]);
            }
            for (AgentIndex a : value_order) {
                check_deadline();
                driver.step_value(driver.runs[static_cast<std::size_t>(a)]);
            }
        } catch (const CancelledError&) {
            timed_out = true;
        }
    } else {
        std::mutex done_mutex;
        std::condition_variable done_cv;
        std::size_t done = 0;
        std::vector<std::exception_ptr> errors(n);
        std::vector<char> cancelled(n, 0);  // not vector<bool>: per-element writes race

        std::vector<std::thread> threads;
        threads.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            threads.emplace_back([&, i] {
                AgentRun& me = driver.runs[i];
                try {
                    driver.step_util(me);
                    driver.step_value(me);
                } catch (const CancelledError&) {
                    cancelled[i] = 1;
                } catch (...) {
                    errors[i] = std::current_exception();
                    cancel.store(true);
                    transport.cancel_all();
                }
                std::lock_guard<std::mutex> lock(done_mutex);
                ++done;
                done_cv.notify_all();
            });
        }
        {
            std::unique_lock<std::mutex> lock(done_mutex);
            bool finished =
                deadline ? done_cv.wait_until(lock, *deadline, [&] { return done == n; })
                         : (done_cv.wait(lock, [&] { return done == n; }), true);
            if (!finished) {
                cancel.store(true);
                transport.cancel_all();
                done_cv.wait(lock, [&] { return done == n; });
            }
        }
        for (auto& t : threads) t.join();

        for (std::size_t r = 0; r < n; ++r) {
            std::size_t i = static_cast<std::size_t>(inst.agent_by_rank(static_cast<int>(r)));
            if (errors[i]) std::rethrow_exception(errors[i]);
        }
        timed_out = std::find(cancelled.begin(), cancelled.end(), 1) != cancelled.end();
    }

    SolveReport report;
    report.assignment = Assignment(inst.num_variables());  // stays unbound unless Optimal
    report.metrics.util_messages = transport.util_messages();
    report.metrics.value_messages = transport.value_messages();
    report.metrics.total_rows_sent = transport.rows_sent();
    report.metrics.induced_width = induced_width(seps);
    report.metrics.components = static_cast<int>(tree->roots.size());
    for (const AgentRun& run : driver.runs) {
        report.metrics.max_table_rows =
            std::max(report.metrics.max_table_rows, static_cast<std::int64_t>(run.table_rows));
        report.metrics.nodes_enumerated += run.nodes;
        report.metrics.simulated_runtime_ns = std::max(report.metrics.simulated_runtime_ns, run.clock);
    }

    if (timed_out) {
        report.status = SolveStatus::Timeout;
    } else {
        bool infeasible = false;
        Utility total = Utility::finite(0);
        for (AgentIndex root : tree->roots) {
            const AgentRun& run = driver.runs[static_cast<std::size_t>(root)];
            if (run.root_best.is_neg_inf()) infeasible = true;
            total += run.root_best;
        }
        if (infeasible) {
            report.status = SolveStatus::Infeasible;
            report.utility = Utility::neg_inf();
        } else {
            report.status = SolveStatus::Optimal;
            report.utility = total;
            report.assignment = Assignment(inst.num_variables());
            for (const AgentRun& run : driver.runs) {
                const auto& own = inst.variables_of(run.id);
                if (run.own_values.size() != own.size())
                    throw ProtocolViolationError("agent finished without binding its variables");
                for (std::size_t i = 0; i < own.size(); ++i)
                    report.assignment.bind(own[i], run.own_values[i]);
            }
            if (evaluate(inst, report.assignment) != report.utility)
                throw ProtocolViolationError("assignment utility disagrees with the projected optimum");
        }
    }

    if (opts.collect_trace) {
        std::vector<TraceEvent> events;
        for (AgentRun& run : driver.runs)
            for (TraceEvent& e : run.events) events.push_back(std::move(e));
        report.trace = render_trace(inst, *tree, seps, std::move(events));
    }

    report.metrics.wall_time_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - wall0).count();
    return report;
}

std::string format_report(const DcopInstance& inst, const SolveReport& report, bool deterministic) {
    std::ostringstream os;
    os << "status=" << status_token(report.status);
    if (report.status == SolveStatus::Optimal) os << " utility=" << report.utility;
    if (report.status == SolveStatus::Infeasible) os << " utility=neginf";
    os << "\n";
    if (report.status == SolveStatus::Optimal) {
        os << "assignment";
        for (std::size_t r = 0; r < inst.num_variables(); ++r) {
            VarIndex v = inst.var_by_rank(static_cast<int>(r));
            os << " " << inst.variable(v).name << "=" << report.assignment.value(v);
        }
        os << "\n";
    }
    const SolveMetrics& m = report.metrics;
    os << "util_messages=" << m.util_messages << "\n";
    os << "value_messages=" << m.value_messages << "\n";
    os << "total_rows_sent=" << m.total_rows_sent << "\n";
    os << "max_table_rows=" << m.max_table_rows << "\n";
    os << "induced_width=" << m.induced_width << "\n";
    os << "components=" << m.components << "\n";
    os << "nodes_enumerated=" << m.nodes_enumerated << "\n";
    os << "simulated_runtime_ns=" << m.simulated_runtime_ns << "\n";
    os << "wall_time_ns=" << (deterministic ? 0 : m.wall_time_ns) << "\n";
    return os.str();
}

}  // namespace dcop
