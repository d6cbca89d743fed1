#include "pipetune/plan.hpp"

#include <algorithm>
#include <map>

#include "pipetune/errors.hpp"

namespace pipetune {

namespace {

// Emits per-device sequences from a warm-up/alternate/drain walk over
// schedule units. A "unit" is a contiguous run of micro-batch indices.
struct UnitRange {
    int first = 0;
    int last = 0;  // inclusive
    int size() const { return last - first + 1; }
};

SchedulePlan make_plan(std::shared_ptr<const TaskGraph> graph, int k,
                       const std::vector<UnitRange>& groups) {
    const TaskGraph& g = *graph;
    const int s_count = g.stage_count;
    const int g_count = static_cast<int>(groups.size());

    SchedulePlan plan;
    plan.graph = std::move(graph);
    plan.config = g.config;
    plan.config.k = k;
    plan.per_device.resize(static_cast<size_t>(s_count));
    plan.units.resize(static_cast<size_t>(s_count));

    for (int s = 0; s < s_count; ++s) {
        auto& seq = plan.per_device[static_cast<size_t>(s)];
        auto& units = plan.units[static_cast<size_t>(s)];
        auto emit = [&](TaskKind kind, const UnitRange& r) {
            const int begin = static_cast<int>(seq.size());
            for (int m = r.first; m <= r.last; ++m)
                seq.push_back(kind == TaskKind::ForwardCompute ? g.forward_ids[s][m]
                                                               : g.backward_ids[s][m]);
            units.push_back({begin, static_cast<int>(seq.size())});
        };

        const int warm = std::min(s_count - s, g_count);
        int next_fwd = 0;
        int next_bwd = 0;
        for (; next_fwd < warm; ++next_fwd) emit(TaskKind::ForwardCompute, groups[static_cast<size_t>(next_fwd)]);
        while (next_fwd < g_count) {
            emit(TaskKind::BackwardCompute, groups[static_cast<size_t>(next_bwd++)]);
            emit(TaskKind::ForwardCompute, groups[static_cast<size_t>(next_fwd++)]);
        }
        while (next_bwd < g_count) emit(TaskKind::BackwardCompute, groups[static_cast<size_t>(next_bwd++)]);

        const int begin = static_cast<int>(seq.size());
        seq.push_back(g.grad_accum_ids[s]);
        units.push_back({begin, static_cast<int>(seq.size())});
    }
    return plan;
}

std::vector<UnitRange> micro_batch_groups(int micro_batches, int k) {
    std::vector<UnitRange> groups;
    for (int first = 0; first < micro_batches; first += k)
        groups.push_back({first, std::min(first + k, micro_batches) - 1});
    return groups;
}

}  // namespace

SchedulePlan plan_1f1b(std::shared_ptr<const TaskGraph> graph) {
    const int m = graph->config.micro_batch_count;
    return make_plan(std::move(graph), 1, micro_batch_groups(m, 1));
}

SchedulePlan plan_kfkb(std::shared_ptr<const TaskGraph> graph, int k) {
    const int m = graph->config.micro_batch_count;
    if (k < 1 || k > m)
        throw PlanError("group member count k=" + std::to_string(k) + " outside [1, M=" +
                        std::to_string(m) + "]");
    return make_plan(std::move(graph), k, micro_batch_groups(m, k));
}

SchedulePlan plan_gpipe(std::shared_ptr<const TaskGraph> graph) {
    const TaskGraph& g = *graph;
    const int m = g.config.micro_batch_count;
    const int s_count = g.stage_count;

    SchedulePlan plan;
    plan.graph = std::move(graph);
    plan.config = g.config;
    plan.config.k = m;
    plan.per_device.resize(static_cast<size_t>(s_count));
    plan.units.resize(static_cast<size_t>(s_count));
    for (int s = 0; s < s_count; ++s) {
        auto& seq = plan.per_device[static_cast<size_t>(s)];
        for (int i = 0; i < m; ++i) seq.push_back(g.forward_ids[s][i]);
        plan.units[static_cast<size_t>(s)].push_back({0, m});
        for (int i = 0; i < m; ++i) seq.push_back(g.backward_ids[s][i]);
        plan.units[static_cast<size_t>(s)].push_back({m, 2 * m});
        seq.push_back(g.grad_accum_ids[s]);
        plan.units[static_cast<size_t>(s)].push_back({2 * m, 2 * m + 1});
    }
    return plan;
}

std::string sequence_string(const SchedulePlan& plan, int device, bool include_grad_accum) {
    const TaskGraph& g = *plan.graph;
    std::string out;
    for (int id : plan.per_device[static_cast<size_t>(device)]) {
        const TaskNode& n = g.node(id);
        if (n.kind == TaskKind::GradAccum && !include_grad_accum) continue;
        if (!out.empty()) out += ' ';
        switch (n.kind) {
            case TaskKind::ForwardCompute: out += 'F'; break;
            case TaskKind::BackwardCompute: out += 'B'; break;
            case TaskKind::GradAccum: out += "GA"; break;
            default: out += '?'; break;
        }
        if (n.kind != TaskKind::GradAccum) out += std::to_string(n.micro_batch);
    }
    return out;
}

std::vector<std::string> check_plan(const SchedulePlan& plan) {
    std::vector<std::string> problems;
    const TaskGraph& g = *plan.graph;
    const size_t n = g.nodes.size();

    // Position of each compute node in its device sequence.
    std::vector<int> position(n, -1);
    for (int d = 0; d < plan.device_count(); ++d) {
        const auto& seq = plan.per_device[static_cast<size_t>(d)];
        for (size_t i = 0; i < seq.size(); ++i) {
            const TaskNode& node = g.node(seq[i]);
            if (node.device != d)
                problems.push_back("node " + std::to_string(seq[i]) + " listed on device " +
                                   std::to_string(d) + " but lives on device " + std::to_string(node.device));
            if (position[static_cast<size_t>(seq[i])] != -1)
                problems.push_back("node " + std::to_string(seq[i]) + " appears twice");
            position[static_cast<size_t>(seq[i])] = static_cast<int>(i);
        }
    }
    for (const TaskNode& node : g.nodes) {
        const bool compute = node.kind == TaskKind::ForwardCompute ||
                             node.kind == TaskKind::BackwardCompute || node.kind == TaskKind::GradAccum;
        if (compute && position[static_cast<size_t>(node.id)] == -1)
            problems.push_back("compute node " + std::to_string(node.id) + " missing from the plan");
    }
    if (!problems.empty()) return problems;

    // Linear extension of the dependencies projected per device: reachability
    // between same-device compute nodes must agree with sequence order.
    // Reachability closure over the DAG in reverse topological order,
    // one bitset row per node.
    const std::vector<int> topo = topological_order(g);
    const size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> reach(n * words, 0);
    std::vector<std::vector<int>> succ(n);
    for (const auto& [u, v] : g.edges) succ[static_cast<size_t>(u)].push_back(v);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const size_t u = static_cast<size_t>(*it);
        for (int v : succ[u]) {
            const size_t sv = static_cast<size_t>(v);
            reach[u * words + sv / 64] |= std::uint64_t{1} << (sv % 64);
            for (size_t w = 0; w < words; ++w) reach[u * words + w] |= reach[sv * words + w];
        }
    }
    auto reaches = [&](int u, int v) {
        return (reach[static_cast<size_t>(u) * words + static_cast<size_t>(v) / 64] >>
                (static_cast<size_t>(v) % 64)) & 1u;
    };
    for (int d = 0; d < plan.device_count(); ++d) {
        const auto& seq = plan.per_device[static_cast<size_t>(d)];
        for (size_t i = 0; i < seq.size(); ++i)
            for (size_t j = i + 1; j < seq.size(); ++j)
                if (reaches(seq[j], seq[i]))
                    problems.push_back("device " + std::to_string(d) + " orders node " +
                                       std::to_string(seq[i]) + " before its dependency " +
                                       std::to_string(seq[j]));
    }

    // Pairing consistency: per link, the producer-side order of sends must
    // equal the consumer-side order of recvs.
    std::vector<std::vector<int>> pred(n);
    for (const auto& [u, v] : g.edges) pred[static_cast<size_t>(v)].push_back(u);
    std::map<LinkId, std::vector<std::pair<int, int>>> send_order, recv_order;  // (position, micro_batch)
    for (const TaskNode& node : g.nodes) {
        if (node.kind == TaskKind::Send) {
            for (int u : pred[static_cast<size_t>(node.id)])
                if (position[static_cast<size_t>(u)] != -1)
                    send_order[node.link].push_back({position[static_cast<size_t>(u)], node.micro_batch});
        } else if (node.kind == TaskKind::Recv) {
            for (int v : succ[static_cast<size_t>(node.id)])
                if (position[static_cast<size_t>(v)] != -1)
                    recv_order[node.link].push_back({position[static_cast<size_t>(v)], node.micro_batch});
        }
    }
    for (auto& [link, sends] : send_order) {
        auto& recvs = recv_order[link];
        std::sort(sends.begin(), sends.end());
        std::sort(recvs.begin(), recvs.end());
        std::vector<int> s_batches, r_batches;
        for (auto& [pos, m] : sends) s_batches.push_back(m);
        for (auto& [pos, m] : recvs) r_batches.push_back(m);
        if (s_batches != r_batches)
            problems.push_back("link " + std::to_string(link) + " send order disagrees with recv order");
    }
    return problems;
}

}  // namespace pipetune
