#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcop/model.hpp"

namespace dcop {

// Random binary-table instances over an Erdos-Renyi style constraint graph.
//
//   edges     M = round(density * C(num_variables, 2)), picked uniformly
//   tables    one per edge, default neginf, exactly round(tightness * d^2)
//             infeasible tuples, finite utilities uniform in [0, 1000]
//   agents    contiguous blocks of ceil(num_variables / num_agents) variables;
//             agents left without a variable are dropped
//
// The same seed reproduces the same instance bit for bit on any platform.
struct RandomGraphParams {
    int num_agents = 5;
    int num_variables = 15;
    int domain_size = 6;
    double density = 0.6;    // p1 in (0, 1]
    double tightness = 0.6;  // p2 in [0, 1]
    std::uint64_t seed = 1;
};

DcopInstance generate_random(const RandomGraphParams& params);

// Power-network instances: every node is an agent with a generation and a
// consumption variable plus one directed flow variable per incident line.
// Hard rules pin flow conservation per line and power balance per node;
// unary tables price generation (cost) and reward consumption (benefit).
enum class Topology { Bus13, Bus34, Bus37, Bus123, Ring };

std::string_view topology_token(Topology t);
Topology parse_topology(std::string_view token);  // throws UnknownTopologyError

struct GridParams {
    Topology topology = Topology::Ring;
    int ring_nodes = 3;       // only read for Topology::Ring
    int domain_size = 3;      // odd, >= 3; generation/consumption range is [0, (d-1)/2]
    int line_capacity = 1;    // flow range is [-capacity, capacity]
    std::uint64_t seed = 1;
};

DcopInstance generate_grid(const GridParams& params);

// Node names plus index edges, in generation order.
struct TopologySpec {
    std::vector<std::string> nodes;
    std::vector<std::pair<int, int>> edges;
};

TopologySpec topology_spec(Topology t, int ring_nodes = 0);

}  // namespace dcop
