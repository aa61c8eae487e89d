// Command-line front end: generate | solve | verify | bench | dump-tree.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcop/generate.hpp"
#include "dcop/io.hpp"
#include "dcop/oracle.hpp"
#include "dcop/pseudotree.hpp"
#include "dcop/runtime.hpp"

namespace {

namespace fs = std::filesystem;

// Relative inputs that do not exist are retried against $DCOP_FIXTURES.
fs::path resolve_input(const std::string& path) {
    fs::path p(path);
    if (fs::exists(p)) return p;
    if (const char* root = std::getenv("DCOP_FIXTURES")) {
        fs::path alt = fs::path(root) / p;
        if (fs::exists(alt)) return alt;
    }
    return p;  // let load_instance report the failure
}

std::vector<dcop::AgentIndex> parse_order(const dcop::DcopInstance& inst, const std::string& csv) {
    std::vector<dcop::AgentIndex> order;
    std::istringstream in(csv);
    std::string name;
    while (std::getline(in, name, ',')) {
        auto a = inst.find_agent(name);
        if (!a) throw dcop::InvalidParamsError("unknown agent in --order: " + name);
        order.push_back(*a);
    }
    return order;
}

int status_exit_code(dcop::SolveStatus s) {
    switch (s) {
        case dcop::SolveStatus::Optimal: return 0;
        case dcop::SolveStatus::Infeasible: return 2;
        case dcop::SolveStatus::Timeout: return 3;
    }
    return 1;
}

struct SolveArgs {
    std::string input;
    std::string strategy = "sparse";
    std::string scheduler = "threads";
    double timeout = 600.0;
    std::int64_t latency = 0;
    bool deterministic = false;
    bool trace = false;
    bool show_tree = false;
    std::string order;
};

int cmd_solve(const SolveArgs& args) {
    dcop::DcopInstance inst = dcop::load_instance(resolve_input(args.input));
    dcop::ConstraintGraph graph = dcop::build_constraint_graph(inst);

    dcop::PseudoTree pinned;
    dcop::SolveOptions opts;
    opts.strategy = dcop::parse_strategy(args.strategy);
    opts.scheduler = dcop::parse_scheduler(args.scheduler);
    opts.timeout_seconds = args.timeout;
    opts.latency_ns = args.latency;
    opts.cost_mode = args.deterministic ? dcop::CostMode::Deterministic : dcop::CostMode::Measured;
    opts.collect_trace = args.trace;
    if (!args.order.empty()) {
        auto order = parse_order(inst, args.order);
        pinned = dcop::build_pseudotree_from_order(inst, graph, order);
        opts.pinned_tree = &pinned;
    }

    dcop::SolveReport report = dcop::solve(inst, opts);

    if (args.show_tree) {
        const dcop::PseudoTree tree = opts.pinned_tree ? pinned : dcop::build_pseudotree(inst, graph);
        dcop::SeparatorSet seps = dcop::compute_separators(inst, graph, tree);
        std::cout << dcop::dump_tree(inst, tree, seps);
    }
    for (const std::string& line : report.trace) std::cout << line << "\n";
    std::cout << dcop::format_report(inst, report, args.deterministic);
    return status_exit_code(report.status);
}

struct VerifyArgs {
    std::string input;
    std::uint64_t cap = 10'000'000;
    bool against = false;
};

int cmd_verify(const VerifyArgs& args) {
    dcop::DcopInstance inst = dcop::load_instance(resolve_input(args.input));
    dcop::OracleResult oracle = dcop::brute_force(inst, args.cap);

    if (oracle.assignment) {
        std::cout << "oracle status=Optimal utility=" << oracle.utility << "\n";
        std::cout << "oracle assignment";
        for (std::size_t r = 0; r < inst.num_variables(); ++r) {
            dcop::VarIndex v = inst.var_by_rank(static_cast<int>(r));
            std::cout << " " << inst.variable(v).name << "=" << oracle.assignment->value(v);
        }
        std::cout << "\n";
    } else {
        std::cout << "oracle status=Infeasible utility=neginf\n";
    }

    bool mismatch = false;
    if (args.against) {
        for (dcop::Strategy s :
             {dcop::Strategy::Dense, dcop::Strategy::Sparse, dcop::Strategy::Rules}) {
            dcop::SolveOptions opts;
            opts.strategy = s;
            opts.scheduler = dcop::SchedulerKind::Sequential;
            opts.cost_mode = dcop::CostMode::Deterministic;
            dcop::SolveReport report = dcop::solve(inst, opts);
            bool ok;
            if (oracle.assignment) {
                ok = report.status == dcop::SolveStatus::Optimal && report.utility == oracle.utility;
            } else {
                ok = report.status == dcop::SolveStatus::Infeasible;
            }
            std::cout << "check strategy=" << dcop::strategy_token(s) << (ok ? " ok" : " MISMATCH")
                      << "\n";
            if (!ok) mismatch = true;
        }
    }
    if (mismatch) return 1;
    return oracle.assignment ? 0 : 2;
}

struct DumpTreeArgs {
    std::string input;
    std::string order;
};

int cmd_dump_tree(const DumpTreeArgs& args) {
    dcop::DcopInstance inst = dcop::load_instance(resolve_input(args.input));
    dcop::ConstraintGraph graph = dcop::build_constraint_graph(inst);
    dcop::PseudoTree tree = args.order.empty()
                                ? dcop::build_pseudotree(inst, graph)
                                : dcop::build_pseudotree_from_order(inst, graph, parse_order(inst, args.order));
    dcop::SeparatorSet seps = dcop::compute_separators(inst, graph, tree);
    std::cout << dcop::dump_tree(inst, tree, seps);
    return 0;
}

void report_written(const dcop::DcopInstance& inst, const fs::path& out) {
    std::cout << "wrote " << out.string() << " name=" << inst.name() << " agents=" << inst.num_agents()
              << " vars=" << inst.num_variables() << " cons=" << inst.num_constraints() << "\n";
}

struct BenchArgs {
    std::vector<int> agents{5};
    std::vector<int> vars{15};
    std::vector<int> dom{6};
    std::vector<double> p1{0.6};
    std::vector<double> p2{0.6};
    int reps = 50;
    std::uint64_t seed = 1;
    std::vector<std::string> strategies{"sparse"};
    std::string scheduler = "threads";
    double timeout = 600.0;
    bool deterministic = false;
    std::string out;
};

int cmd_bench(const BenchArgs& args) {
    std::ofstream csv(args.out, std::ios::binary);
    if (!csv) throw dcop::Error("cannot write " + args.out);
    csv << "# schema dcop-bench-1\n";
    csv << "instance,agents,vars,dom,p1,p2,seed,strategy,status,utility,induced_width,"
           "util_messages,value_messages,total_rows_sent,max_table_rows,nodes_enumerated,"
           "simulated_runtime_ns,wall_time_ns\n";

    struct Summary {
        int solved = 0;
        int total = 0;
        double runtime_ms_sum = 0.0;  // non-timeout rows only
    };
    std::map<std::string, Summary> summaries;

    std::uint64_t instance_seed = args.seed;
    for (int na : args.agents)
        for (int nx : args.vars)
            for (int d : args.dom)
                for (double p1 : args.p1)
                    for (double p2 : args.p2)
                        for (int rep = 0; rep < args.reps; ++rep) {
                            dcop::RandomGraphParams params;
                            params.num_agents = na;
                            params.num_variables = nx;
                            params.domain_size = d;
                            params.density = p1;
                            params.tightness = p2;
                            params.seed = instance_seed++;
                            dcop::DcopInstance inst = dcop::generate_random(params);

                            for (const std::string& sname : args.strategies) {
                                dcop::SolveOptions opts;
                                opts.strategy = dcop::parse_strategy(sname);
                                opts.scheduler = dcop::parse_scheduler(args.scheduler);
                                opts.timeout_seconds = args.timeout;
                                opts.cost_mode = args.deterministic ? dcop::CostMode::Deterministic
                                                                    : dcop::CostMode::Measured;
                                dcop::SolveReport r = dcop::solve(inst, opts);

                                const dcop::SolveMetrics& m = r.metrics;
                                csv << inst.name() << "," << na << "," << nx << "," << d << "," << p1
                                    << "," << p2 << "," << params.seed << "," << sname << ","
                                    << dcop::status_token(r.status) << ",";
                                if (r.status == dcop::SolveStatus::Optimal)
                                    csv << r.utility;
                                else if (r.status == dcop::SolveStatus::Infeasible)
                                    csv << "neginf";
                                csv << "," << m.induced_width << "," << m.util_messages << ","
                                    << m.value_messages << "," << m.total_rows_sent << ","
                                    << m.max_table_rows << "," << m.nodes_enumerated << ","
                                    << m.simulated_runtime_ns << "," << m.wall_time_ns << "\n";

                                std::ostringstream key;
                                key << "agents=" << na << " vars=" << nx << " dom=" << d << " p1=" << p1
                                    << " p2=" << p2 << " strategy=" << sname;
                                Summary& s = summaries[key.str()];
                                ++s.total;
                                if (r.status != dcop::SolveStatus::Timeout) {
                                    ++s.solved;
                                    s.runtime_ms_sum += static_cast<double>(m.simulated_runtime_ns) / 1e6;
                                }
                            }
                        }
    if (!csv) throw dcop::Error("write failed: " + args.out);

    // A configuration counts as failed when it solves less than 85% of its
    // instances inside the timeout; means skip timed-out rows.
    for (const auto& [key, s] : summaries) {
        double pct = s.total ? 100.0 * s.solved / s.total : 0.0;
        std::cout << key << " solved=" << s.solved << "/" << s.total << " (" << pct << "%)";
        if (s.solved > 0) std::cout << " mean_simulated_ms=" << s.runtime_ms_sum / s.solved;
        if (pct < 85.0) std::cout << " FAILED";
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed constraint optimization via utility propagation on a DFS pseudo-tree"};
    app.require_subcommand(1);
    int rc = 0;

    auto* gen = app.add_subcommand("generate", "generate an instance file");
    gen->require_subcommand(1);

    dcop::RandomGraphParams rparams;
    std::string rout;
    auto* grandom = gen->add_subcommand("random", "random binary-table instance");
    grandom->add_option("--agents", rparams.num_agents, "number of agents")->capture_default_str();
    grandom->add_option("--vars", rparams.num_variables, "number of variables")->capture_default_str();
    grandom->add_option("--dom", rparams.domain_size, "domain size")->capture_default_str();
    grandom->add_option("--p1", rparams.density, "constraint graph density in (0,1]")->capture_default_str();
    grandom->add_option("--p2", rparams.tightness, "constraint tightness in [0,1]")->capture_default_str();
    grandom->add_option("--seed", rparams.seed, "generator seed")->capture_default_str();
    grandom->add_option("-o,--out", rout, "output file")->required();
    grandom->callback([&] {
        dcop::DcopInstance inst = dcop::generate_random(rparams);
        dcop::save_instance(inst, rout);
        report_written(inst, rout);
    });

    dcop::GridParams gparams;
    std::string gtopology = "ring";
    std::string gout;
    auto* ggrid = gen->add_subcommand("grid", "power-network instance with hard balance rules");
    ggrid->add_option("--topology", gtopology, "ring, bus13, bus34, bus37 or bus123")->capture_default_str();
    ggrid->add_option("--nodes", gparams.ring_nodes, "node count for ring")->capture_default_str();
    ggrid->add_option("--dom", gparams.domain_size, "odd domain size >= 3")->capture_default_str();
    ggrid->add_option("--cap", gparams.line_capacity, "line flow capacity")->capture_default_str();
    ggrid->add_option("--seed", gparams.seed, "generator seed")->capture_default_str();
    ggrid->add_option("-o,--out", gout, "output file")->required();
    ggrid->callback([&] {
        gparams.topology = dcop::parse_topology(gtopology);
        dcop::DcopInstance inst = dcop::generate_grid(gparams);
        dcop::save_instance(inst, gout);
        report_written(inst, gout);
    });

    SolveArgs sargs;
    auto* solve = app.add_subcommand("solve", "solve an instance file");
    solve->add_option("file", sargs.input, "instance file")->required();
    solve->add_option("--strategy", sargs.strategy, "dense, sparse or rules")->capture_default_str();
    solve->add_option("--scheduler", sargs.scheduler, "seq or threads")->capture_default_str();
    solve->add_option("--timeout", sargs.timeout, "seconds, <= 0 disables")->capture_default_str();
    solve->add_option("--latency", sargs.latency, "simulated per-message latency in ns")->capture_default_str();
    solve->add_flag("--deterministic", sargs.deterministic,
                    "deterministic cost model and byte-stable output");
    solve->add_flag("--trace", sargs.trace, "print the canonical message trace");
    solve->add_flag("--dump-tree", sargs.show_tree, "print the pseudo-tree before the report");
    solve->add_option("--order", sargs.order, "comma-separated DFS visit order pinning the tree");
    solve->callback([&] { rc = cmd_solve(sargs); });

    VerifyArgs vargs;
    auto* verify = app.add_subcommand("verify", "brute-force an instance, optionally cross-check the solver");
    verify->add_option("file", vargs.input, "instance file")->required();
    verify->add_option("--cap", vargs.cap, "assignment-space cap")->capture_default_str();
    verify->add_flag("--against", vargs.against, "also solve with every strategy and compare");
    verify->callback([&] { rc = cmd_verify(vargs); });

    BenchArgs bargs;
    auto* bench = app.add_subcommand("bench", "sweep random instances and emit CSV");
    bench->add_option("--agents", bargs.agents, "agent counts")->delimiter(',')->capture_default_str();
    bench->add_option("--vars", bargs.vars, "variable counts")->delimiter(',')->capture_default_str();
    bench->add_option("--dom", bargs.dom, "domain sizes")->delimiter(',')->capture_default_str();
    bench->add_option("--p1", bargs.p1, "densities")->delimiter(',')->capture_default_str();
    bench->add_option("--p2", bargs.p2, "tightnesses")->delimiter(',')->capture_default_str();
    bench->add_option("--reps", bargs.reps, "instances per configuration")->capture_default_str();
    bench->add_option("--seed", bargs.seed, "base seed, one increment per instance")->capture_default_str();
    bench->add_option("--strategies", bargs.strategies, "strategies to run")->delimiter(',')->capture_default_str();
    bench->add_option("--scheduler", bargs.scheduler, "seq or threads")->capture_default_str();
    bench->add_option("--timeout", bargs.timeout, "per-solve timeout in seconds")->capture_default_str();
    bench->add_flag("--deterministic", bargs.deterministic, "deterministic cost model");
    bench->add_option("--out", bargs.out, "CSV output path")->required();
    bench->callback([&] { rc = cmd_bench(bargs); });

    DumpTreeArgs dargs;
    auto* dump = app.add_subcommand("dump-tree", "print the pseudo-tree of an instance");
    dump->add_option("file", dargs.input, "instance file")->required();
    dump->add_option("--order", dargs.order, "comma-separated DFS visit order pinning the tree");
    dump->callback([&] { rc = cmd_dump_tree(dargs); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help stays 0, usage mistakes collapse to 1
    } catch (const dcop::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
