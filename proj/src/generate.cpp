#include "dcop/generate.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include "dcop/rng.hpp"

namespace dcop {

namespace {

std::string padded(std::string_view prefix, int i, int count) {
    int width = 1;
    for (int v = count - 1; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(i);
    std::string out(prefix);
    out.append(static_cast<std::size_t>(width) - digits.size(), '0');
    out += digits;
    return out;
}

std::string format_fraction(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

DcopInstance generate_random(const RandomGraphParams& p) {
    if (p.num_agents < 1) throw InvalidParamsError("num_agents must be >= 1");
    if (p.num_variables < 1) throw InvalidParamsError("num_variables must be >= 1");
    if (p.num_agents > p.num_variables) throw InvalidParamsError("more agents than variables");
    if (p.domain_size < 1) throw InvalidParamsError("domain_size must be >= 1");
    if (!(p.density > 0.0 && p.density <= 1.0)) throw InvalidParamsError("density must be in (0, 1]");
    if (!(p.tightness >= 0.0 && p.tightness <= 1.0)) throw InvalidParamsError("tightness must be in [0, 1]");

    const int n = p.num_variables;
    const std::int64_t all_pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
    const std::int64_t want_edges = std::llround(p.density * static_cast<double>(all_pairs));

    SplitMix64 rng(p.seed);

    DcopInstance inst;
    {
        std::ostringstream name;
        name << "random-a" << p.num_agents << "-x" << n << "-d" << p.domain_size << "-p"
             << format_fraction(p.density) << "-q" << format_fraction(p.tightness) << "-s" << p.seed;
        inst.set_name(name.str());
    }

    // Contiguous ownership blocks; a short tail leaves the last agents empty
    // and those are simply not created.
    const int block = (n + p.num_agents - 1) / p.num_agents;
    const int used_agents = (n + block - 1) / block;
    std::vector<AgentIndex> agents;
    for (int a = 0; a < used_agents; ++a) agents.push_back(inst.add_agent(padded("a", a, used_agents)));
    std::vector<VarIndex> vars;
    for (int i = 0; i < n; ++i)
        vars.push_back(inst.add_variable(padded("x", i, n), agents[static_cast<std::size_t>(i / block)], 0,
                                         static_cast<Value>(p.domain_size - 1)));

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(all_pairs));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    // Partial Fisher-Yates: the first want_edges slots end up a uniform sample.
    for (std::int64_t k = 0; k < want_edges; ++k) {
        std::uint64_t j = static_cast<std::uint64_t>(k) +
                          rng.next_below(static_cast<std::uint64_t>(all_pairs - k));
        std::swap(pairs[static_cast<std::size_t>(k)], pairs[static_cast<std::size_t>(j)]);
    }
    pairs.resize(static_cast<std::size_t>(want_edges));
    std::sort(pairs.begin(), pairs.end());

    const std::int64_t tuples = static_cast<std::int64_t>(p.domain_size) * p.domain_size;
    const std::int64_t infeasible = std::llround(p.tightness * static_cast<double>(tuples));

    std::vector<std::int64_t> slots(static_cast<std::size_t>(tuples));
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        auto [i, j] = pairs[e];
        for (std::int64_t t = 0; t < tuples; ++t) slots[static_cast<std::size_t>(t)] = t;
        for (std::int64_t k = 0; k < infeasible; ++k) {
            std::uint64_t r = static_cast<std::uint64_t>(k) +
                              rng.next_below(static_cast<std::uint64_t>(tuples - k));
            std::swap(slots[static_cast<std::size_t>(k)], slots[static_cast<std::size_t>(r)]);
        }
        std::vector<bool> blocked(static_cast<std::size_t>(tuples), false);
        for (std::int64_t k = 0; k < infeasible; ++k) blocked[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])] = true;

        std::vector<std::pair<std::vector<Value>, std::int64_t>> rows;
        for (std::int64_t t = 0; t < tuples; ++t) {
            if (blocked[static_cast<std::size_t>(t)]) continue;
            Value vi = static_cast<Value>(t / p.domain_size);
            Value vj = static_cast<Value>(t % p.domain_size);
            rows.push_back({{vi, vj}, rng.next_int(0, 1000)});
        }
        inst.add_table_constraint(padded("c", static_cast<int>(e), static_cast<int>(pairs.size())),
                                  {vars[static_cast<std::size_t>(i)], vars[static_cast<std::size_t>(j)]},
                                  /*default_neg_inf=*/true, std::move(rows));
    }

    inst.finalize();
    return inst;
}

std::string_view topology_token(Topology t) {
    switch (t) {
        case Topology::Bus13: return "bus13";
        case Topology::Bus34: return "bus34";
        case Topology::Bus37: return "bus37";
        case Topology::Bus123: return "bus123";
        case Topology::Ring: return "ring";
    }
    throw Error("unreachable topology_token");
}

Topology parse_topology(std::string_view token) {
    if (token == "bus13") return Topology::Bus13;
    if (token == "bus34") return Topology::Bus34;
    if (token == "bus37") return Topology::Bus37;
    if (token == "bus123") return Topology::Bus123;
    if (token == "ring") return Topology::Ring;
    throw UnknownTopologyError("unknown topology: " + std::string(token));
}

namespace {

TopologySpec from_named_edges(std::initializer_list<std::pair<const char*, const char*>> edges) {
    TopologySpec spec;
    auto index_of = [&](const char* name) {
        for (std::size_t i = 0; i < spec.nodes.size(); ++i)
            if (spec.nodes[i] == name) return static_cast<int>(i);
        spec.nodes.emplace_back(name);
        return static_cast<int>(spec.nodes.size() - 1);
    };
    for (auto [a, b] : edges) {
        int ia = index_of(a);
        int ib = index_of(b);
        spec.edges.emplace_back(ia, ib);
    }
    return spec;
}

// 13-node feeder.
TopologySpec bus13_spec() {
    return from_named_edges({
        {"650", "632"}, {"632", "633"}, {"633", "634"}, {"632", "645"}, {"645", "646"},
        {"632", "671"}, {"671", "684"}, {"684", "611"}, {"684", "652"}, {"671", "680"},
        {"671", "692"}, {"692", "675"},
    });
}

// 34-node feeder.
TopologySpec bus34_spec() {
    return from_named_edges({
        {"800", "802"}, {"802", "806"}, {"806", "808"}, {"808", "810"}, {"808", "812"},
        {"812", "814"}, {"814", "850"}, {"850", "816"}, {"816", "818"}, {"818", "820"},
        {"820", "822"}, {"816", "824"}, {"824", "826"}, {"824", "828"}, {"828", "830"},
        {"830", "854"}, {"854", "856"}, {"854", "852"}, {"852", "832"}, {"832", "858"},
        {"858", "864"}, {"858", "834"}, {"834", "860"}, {"860", "836"}, {"836", "840"},
        {"836", "862"}, {"862", "838"}, {"834", "842"}, {"842", "844"}, {"844", "846"},
        {"846", "848"}, {"832", "888"}, {"888", "890"},
    });
}

// 37-node feeder.
TopologySpec bus37_spec() {
    return from_named_edges({
        {"799", "701"}, {"701", "702"}, {"702", "705"}, {"702", "713"}, {"702", "703"},
        {"705", "742"}, {"705", "712"}, {"713", "704"}, {"704", "714"}, {"704", "720"},
        {"714", "718"}, {"720", "707"}, {"720", "706"}, {"707", "724"}, {"707", "722"},
        {"706", "725"}, {"703", "727"}, {"703", "730"}, {"727", "744"}, {"744", "728"},
        {"744", "729"}, {"730", "709"}, {"709", "731"}, {"709", "708"}, {"709", "775"},
        {"708", "732"}, {"708", "733"}, {"733", "734"}, {"734", "737"}, {"734", "710"},
        {"737", "738"}, {"738", "711"}, {"711", "741"}, {"711", "740"}, {"710", "735"},
        {"710", "736"},
    });
}

// 123-node radial feeder: a 41-node trunk, one lateral per trunk node past the
// head, laterals two nodes deep except the two three-deep ones at positions
// 10 and 20. 41 + 38*2 + 2*3 = 123.
TopologySpec bus123_spec() {
    TopologySpec spec;
    auto add_node = [&](std::string name) {
        spec.nodes.push_back(std::move(name));
        return static_cast<int>(spec.nodes.size() - 1);
    };
    std::vector<int> trunk;
    for (int i = 0; i <= 40; ++i) {
        int idx = add_node(padded("t", i, 41));
        trunk.push_back(idx);
        if (i > 0) spec.edges.emplace_back(trunk[static_cast<std::size_t>(i - 1)], idx);
    }
    for (int i = 1; i <= 40; ++i) {
        int depth = (i == 10 || i == 20) ? 3 : 2;
        int prev = trunk[static_cast<std::size_t>(i)];
        for (int d = 0; d < depth; ++d) {
            int idx = add_node(padded("t", i, 41) + static_cast<char>('a' + d));
            spec.edges.emplace_back(prev, idx);
            prev = idx;
        }
    }
    return spec;
}

}  // namespace

TopologySpec topology_spec(Topology t, int ring_nodes) {
    switch (t) {
        case Topology::Bus13: return bus13_spec();
        case Topology::Bus34: return bus34_spec();
        case Topology::Bus37: return bus37_spec();
        case Topology::Bus123: return bus123_spec();
        case Topology::Ring: {
            if (ring_nodes < 3) throw InvalidParamsError("ring needs at least 3 nodes");
            TopologySpec spec;
            for (int i = 0; i < ring_nodes; ++i) spec.nodes.push_back(padded("n", i, ring_nodes));
            for (int i = 0; i < ring_nodes; ++i) spec.edges.emplace_back(i, (i + 1) % ring_nodes);
            return spec;
        }
    }
    throw Error("unreachable topology_spec");
}

DcopInstance generate_grid(const GridParams& p) {
    if (p.domain_size < 3 || p.domain_size % 2 == 0)
        throw InvalidParamsError("domain_size must be odd and >= 3");
    if (p.line_capacity < 1) throw InvalidParamsError("line_capacity must be >= 1");
    TopologySpec spec = topology_spec(p.topology, p.ring_nodes);

    const Value k = static_cast<Value>((p.domain_size - 1) / 2);
    const Value cap = static_cast<Value>(p.line_capacity);

    SplitMix64 rng(p.seed);
    DcopInstance inst;
    {
        std::ostringstream name;
        name << "grid-" << topology_token(p.topology);
        if (p.topology == Topology::Ring) name << p.ring_nodes;
        name << "-d" << p.domain_size << "-c" << p.line_capacity << "-s" << p.seed;
        inst.set_name(name.str());
    }

    const int num_nodes = static_cast<int>(spec.nodes.size());
    std::vector<AgentIndex> agents;
    for (int i = 0; i < num_nodes; ++i) agents.push_back(inst.add_agent(spec.nodes[static_cast<std::size_t>(i)]));

    // Per node: generation, consumption, then one flow variable per incident
    // line in topology edge order. Flow f_<a>_<b> lives at node a.
    std::vector<VarIndex> gen(static_cast<std::size_t>(num_nodes));
    std::vector<VarIndex> cons(static_cast<std::size_t>(num_nodes));
    std::vector<std::vector<VarIndex>> flows(static_cast<std::size_t>(num_nodes));
    auto flow_name = [&](int a, int b) {
        return "f_" + spec.nodes[static_cast<std::size_t>(a)] + "_" + spec.nodes[static_cast<std::size_t>(b)];
    };
    for (int nidx = 0; nidx < num_nodes; ++nidx) {
        const std::string& nn = spec.nodes[static_cast<std::size_t>(nidx)];
        gen[static_cast<std::size_t>(nidx)] = inst.add_variable("g_" + nn, agents[static_cast<std::size_t>(nidx)], 0, k);
        cons[static_cast<std::size_t>(nidx)] = inst.add_variable("c_" + nn, agents[static_cast<std::size_t>(nidx)], 0, k);
        for (auto [a, b] : spec.edges) {
            if (a == nidx)
                flows[static_cast<std::size_t>(nidx)].push_back(
                    inst.add_variable(flow_name(a, b), agents[static_cast<std::size_t>(nidx)], -cap, cap));
            else if (b == nidx)
                flows[static_cast<std::size_t>(nidx)].push_back(
                    inst.add_variable(flow_name(b, a), agents[static_cast<std::size_t>(nidx)], -cap, cap));
        }
    }

    // Conservation on every line; the only inter-agent constraints.
    for (auto [a, b] : spec.edges) {
        VarIndex fab = *inst.find_variable(flow_name(a, b));
        VarIndex fba = *inst.find_variable(flow_name(b, a));
        inst.add_rule_constraint("lb_" + spec.nodes[static_cast<std::size_t>(a)] + "_" + spec.nodes[static_cast<std::size_t>(b)],
                                 {fab, fba}, {1, 1}, RelOp::Eq, 0, 0);
    }

    for (int nidx = 0; nidx < num_nodes; ++nidx) {
        const std::string& nn = spec.nodes[static_cast<std::size_t>(nidx)];

        // generation = consumption + net outflow
        std::vector<VarIndex> scope{gen[static_cast<std::size_t>(nidx)], cons[static_cast<std::size_t>(nidx)]};
        std::vector<std::int64_t> coeffs{1, -1};
        for (VarIndex f : flows[static_cast<std::size_t>(nidx)]) {
            scope.push_back(f);
            coeffs.push_back(-1);
        }
        inst.add_rule_constraint("nb_" + nn, std::move(scope), std::move(coeffs), RelOp::Eq, 0, 0);

        std::int64_t cost = rng.next_int(1, 10);
        std::int64_t benefit = rng.next_int(1, 10);
        std::vector<std::pair<std::vector<Value>, std::int64_t>> cost_rows;
        std::vector<std::pair<std::vector<Value>, std::int64_t>> benefit_rows;
        for (Value v = 0; v <= k; ++v) {
            cost_rows.push_back({{v}, -cost * v});
            benefit_rows.push_back({{v}, benefit * v});
        }
        inst.add_table_constraint("gc_" + nn, {gen[static_cast<std::size_t>(nidx)]}, false, std::move(cost_rows));
        inst.add_table_constraint("cb_" + nn, {cons[static_cast<std::size_t>(nidx)]}, false, std::move(benefit_rows));
    }

    inst.finalize();
    return inst;
}

}  // namespace dcop
