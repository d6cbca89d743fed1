#pragma once

#include <string>
#include <vector>

#include "pipetune/model.hpp"

namespace pipetune {

enum class TaskKind { ForwardCompute, BackwardCompute, Send, Recv, GradAccum };

const char* task_kind_name(TaskKind kind);

struct TaskNode {
    int id = -1;
    TaskKind kind = TaskKind::ForwardCompute;
    int stage_id = -1;
    int micro_batch = -1;  // -1 for GradAccum
    int device = -1;
    LinkId link = -1;        // Send/Recv only
    Bytes payload_bytes = 0;  // Send/Recv only
};

// Dependency DAG of per-micro-batch stage computation instances. Forward
// and backward computes chain across stages through Send/Recv pairs; each
// stage ends in one GradAccum sink that depends on all of its backwards.
struct TaskGraph {
    std::vector<TaskNode> nodes;
    std::vector<std::pair<int, int>> edges;
    PlanConfig config;
    int stage_count = 0;

    // Lookup tables filled by build_task_graph; not maintained across
    // manual mutation (validate() works from nodes/edges alone).
    std::vector<std::vector<int>> forward_ids;   // [stage][micro_batch]
    std::vector<std::vector<int>> backward_ids;  // [stage][micro_batch]
    std::vector<int> grad_accum_ids;             // [stage]
    std::vector<int> send_of_compute;            // compute id -> send id or -1
    std::vector<int> recv_of_compute;            // compute id -> recv id or -1
    std::vector<int> pair_of;                    // send id <-> recv id, else -1

    const TaskNode& node(int id) const { return nodes[static_cast<size_t>(id)]; }
    bool is_compute(int id) const {
        const TaskKind k = node(id).kind;
        return k == TaskKind::ForwardCompute || k == TaskKind::BackwardCompute ||
               k == TaskKind::GradAccum;
    }
};

TaskGraph build_task_graph(const ModelSpec& model, const PlanConfig& config);

enum class ViolationKind {
    CycleDetected,
    UnpairedSend,
    UnpairedRecv,
    PayloadMismatch,
    MissingRecvPredecessor,
    IncompleteGradAccum,
    InvalidStage,
};

struct Violation {
    ViolationKind kind;
    int node_id = -1;
    std::string detail;
};

const char* violation_kind_name(ViolationKind kind);

// Empty result iff all TaskGraph invariants hold. Works on arbitrary
// (possibly hand-mutated) graphs; never throws.
std::vector<Violation> validate(const TaskGraph& graph);

// Node ids in a deterministic topological order; throws PlanError on cycles.
std::vector<int> topological_order(const TaskGraph& graph);

}  // namespace pipetune
