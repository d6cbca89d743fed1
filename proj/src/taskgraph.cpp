#include "pipetune/taskgraph.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "pipetune/errors.hpp"

namespace pipetune {

const char* task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::ForwardCompute: return "forward";
        case TaskKind::BackwardCompute: return "backward";
        case TaskKind::Send: return "send";
        case TaskKind::Recv: return "recv";
        case TaskKind::GradAccum: return "grad_accum";
    }
    return "?";
}

const char* violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::CycleDetected: return "CycleDetected";
        case ViolationKind::UnpairedSend: return "UnpairedSend";
        case ViolationKind::UnpairedRecv: return "UnpairedRecv";
        case ViolationKind::PayloadMismatch: return "PayloadMismatch";
        case ViolationKind::MissingRecvPredecessor: return "MissingRecvPredecessor";
        case ViolationKind::IncompleteGradAccum: return "IncompleteGradAccum";
        case ViolationKind::InvalidStage: return "InvalidStage";
    }
    return "?";
}

TaskGraph build_task_graph(const ModelSpec& model, const PlanConfig& config) {
    model.validate();
    if (config.micro_batch_size < 1 || model.global_batch % config.micro_batch_size != 0)
        throw ConfigError("micro_batch_size " + std::to_string(config.micro_batch_size) +
                          " does not divide global_batch " + std::to_string(model.global_batch));
    if (config.micro_batch_count != model.global_batch / config.micro_batch_size)
        throw ConfigError("micro_batch_count inconsistent with global_batch / micro_batch_size");

    const int s_count = model.stage_count();
    const int m_count = config.micro_batch_count;
    const int b = config.micro_batch_size;

    TaskGraph g;
    g.config = config;
    g.stage_count = s_count;
    g.forward_ids.assign(s_count, std::vector<int>(m_count, -1));
    g.backward_ids.assign(s_count, std::vector<int>(m_count, -1));
    g.grad_accum_ids.assign(s_count, -1);

    auto add_node = [&g](TaskNode n) {
        n.id = static_cast<int>(g.nodes.size());
        g.nodes.push_back(n);
        return n.id;
    };

    for (int s = 0; s < s_count; ++s) {
        for (int m = 0; m < m_count; ++m) {
            g.forward_ids[s][m] = add_node({-1, TaskKind::ForwardCompute, s, m, s, -1, 0});
            g.backward_ids[s][m] = add_node({-1, TaskKind::BackwardCompute, s, m, s, -1, 0});
        }
        g.grad_accum_ids[s] = add_node({-1, TaskKind::GradAccum, s, -1, s, -1, 0});
    }

    auto link_pair = [&](int from_compute, int to_compute, LinkId link, Bytes payload) {
        const TaskNode& from = g.nodes[static_cast<size_t>(from_compute)];
        const TaskNode& to = g.nodes[static_cast<size_t>(to_compute)];
        const int send = add_node({-1, TaskKind::Send, from.stage_id, from.micro_batch, from.device, link, payload});
        const int recv = add_node({-1, TaskKind::Recv, to.stage_id, to.micro_batch, to.device, link, payload});
        g.edges.emplace_back(from_compute, send);
        g.edges.emplace_back(send, recv);
        g.edges.emplace_back(recv, to_compute);
    };

    for (int m = 0; m < m_count; ++m) {
        for (int s = 0; s + 1 < s_count; ++s)
            link_pair(g.forward_ids[s][m], g.forward_ids[s + 1][m], forward_link(s),
                      transfer_bytes(model.stages[static_cast<size_t>(s)], b, Direction::Forward));
        // Last stage's backward consumes its own forward's activations directly.
        g.edges.emplace_back(g.forward_ids[s_count - 1][m], g.backward_ids[s_count - 1][m]);
        for (int s = s_count - 1; s > 0; --s)
            link_pair(g.backward_ids[s][m], g.backward_ids[s - 1][m], backward_link(s - 1),
                      transfer_bytes(model.stages[static_cast<size_t>(s)], b, Direction::Backward));
    }
    for (int s = 0; s < s_count; ++s)
        for (int m = 0; m < m_count; ++m)
            g.edges.emplace_back(g.backward_ids[s][m], g.grad_accum_ids[s]);

    g.send_of_compute.assign(g.nodes.size(), -1);
    g.recv_of_compute.assign(g.nodes.size(), -1);
    g.pair_of.assign(g.nodes.size(), -1);
    for (const auto& [u, v] : g.edges) {
        const TaskKind uk = g.nodes[static_cast<size_t>(u)].kind;
        const TaskKind vk = g.nodes[static_cast<size_t>(v)].kind;
        if (vk == TaskKind::Send) g.send_of_compute[static_cast<size_t>(u)] = v;
        if (uk == TaskKind::Recv) g.recv_of_compute[static_cast<size_t>(v)] = u;
        if (uk == TaskKind::Send && vk == TaskKind::Recv) {
            g.pair_of[static_cast<size_t>(u)] = v;
            g.pair_of[static_cast<size_t>(v)] = u;
        }
    }
    return g;
}

namespace {

std::vector<std::vector<int>> successor_lists(const TaskGraph& g) {
    std::vector<std::vector<int>> succ(g.nodes.size());
    for (const auto& [u, v] : g.edges) succ[static_cast<size_t>(u)].push_back(v);
    return succ;
}

}  // namespace

std::vector<int> topological_order(const TaskGraph& g) {
    const size_t n = g.nodes.size();
    std::vector<int> indegree(n, 0);
    auto succ = successor_lists(g);
    for (const auto& [u, v] : g.edges) {
        (void)u;
        ++indegree[static_cast<size_t>(v)];
    }
    // Min-id frontier keeps the order deterministic.
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push(static_cast<int>(i));
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        const int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int v : succ[static_cast<size_t>(u)])
            if (--indegree[static_cast<size_t>(v)] == 0) ready.push(v);
    }
    if (order.size() != n) throw PlanError("task graph contains a cycle");
    return order;
}

std::vector<Violation> validate(const TaskGraph& g) {
    std::vector<Violation> out;
    const size_t n = g.nodes.size();

    for (const TaskNode& node : g.nodes) {
        if (node.kind != TaskKind::Send && node.kind != TaskKind::Recv &&
            (node.stage_id < 0 || node.stage_id >= g.stage_count))
            out.push_back({ViolationKind::InvalidStage, node.id,
                           "compute node references stage " + std::to_string(node.stage_id)});
    }

    std::vector<std::vector<int>> pred(n), succ(n);
    for (const auto& [u, v] : g.edges) {
        if (u < 0 || v < 0 || static_cast<size_t>(u) >= n || static_cast<size_t>(v) >= n) continue;
        succ[static_cast<size_t>(u)].push_back(v);
        pred[static_cast<size_t>(v)].push_back(u);
    }

    // Acyclicity via Kahn's algorithm.
    {
        std::vector<int> indegree(n, 0);
        for (size_t v = 0; v < n; ++v) indegree[v] = static_cast<int>(pred[v].size());
        std::queue<int> ready;
        for (size_t i = 0; i < n; ++i)
            if (indegree[i] == 0) ready.push(static_cast<int>(i));
        size_t seen = 0;
        while (!ready.empty()) {
            const int u = ready.front();
            ready.pop();
            ++seen;
            for (int v : succ[static_cast<size_t>(u)])
                if (--indegree[static_cast<size_t>(v)] == 0) ready.push(v);
        }
        if (seen != n) out.push_back({ViolationKind::CycleDetected, -1, "graph is not acyclic"});
    }

    for (const TaskNode& node : g.nodes) {
        const size_t id = static_cast<size_t>(node.id);
        if (node.kind == TaskKind::Send) {
            int recv_count = 0;
            for (int v : succ[id]) {
                const TaskNode& peer = g.nodes[static_cast<size_t>(v)];
                if (peer.kind != TaskKind::Recv) continue;
                ++recv_count;
                if (peer.link != node.link || peer.payload_bytes != node.payload_bytes)
                    out.push_back({ViolationKind::PayloadMismatch, node.id,
                                   "send/recv pair disagrees on link or payload"});
            }
            if (recv_count != 1)
                out.push_back({ViolationKind::UnpairedSend, node.id,
                               "send has " + std::to_string(recv_count) + " recv successors"});
        } else if (node.kind == TaskKind::Recv) {
            int send_count = 0;
            for (int u : pred[id])
                if (g.nodes[static_cast<size_t>(u)].kind == TaskKind::Send) ++send_count;
            if (send_count != 1)
                out.push_back({ViolationKind::UnpairedRecv, node.id,
                               "recv has " + std::to_string(send_count) + " send predecessors"});
        } else if (node.kind == TaskKind::ForwardCompute && node.stage_id > 0) {
            int recvs = 0;
            for (int u : pred[id])
                if (g.nodes[static_cast<size_t>(u)].kind == TaskKind::Recv) ++recvs;
            if (recvs != 1)
                out.push_back({ViolationKind::MissingRecvPredecessor, node.id,
                               "forward at stage " + std::to_string(node.stage_id) + " has " +
                                   std::to_string(recvs) + " recv predecessors"});
        } else if (node.kind == TaskKind::BackwardCompute && node.stage_id < g.stage_count - 1) {
            int recvs = 0;
            for (int u : pred[id])
                if (g.nodes[static_cast<size_t>(u)].kind == TaskKind::Recv) ++recvs;
            if (recvs != 1)
                out.push_back({ViolationKind::MissingRecvPredecessor, node.id,
                               "backward at stage " + std::to_string(node.stage_id) + " has " +
                                   std::to_string(recvs) + " recv predecessors"});
        } else if (node.kind == TaskKind::GradAccum) {
            int backwards = 0;
            for (int u : pred[id])
                if (g.nodes[static_cast<size_t>(u)].kind == TaskKind::BackwardCompute &&
                    g.nodes[static_cast<size_t>(u)].stage_id == node.stage_id)
                    ++backwards;
            if (backwards != g.config.micro_batch_count)
                out.push_back({ViolationKind::IncompleteGradAccum, node.id,
                               "grad accum depends on " + std::to_string(backwards) + " of " +
                                   std::to_string(g.config.micro_batch_count) + " backwards"});
        }
    }
    return out;
}

}  // namespace pipetune
