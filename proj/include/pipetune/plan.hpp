#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pipetune/taskgraph.hpp"

namespace pipetune {

// Half-open index range [begin, end) into a device's action list; one
// schedule unit covers at most k consecutive computes of the same kind.
struct ScheduleUnit {
    int begin = 0;
    int end = 0;
};

// Per-device totally ordered action sequences over the task graph's
// compute nodes (forward/backward computes plus the trailing GradAccum).
// Send/Recv launch order is induced from these sequences by the simulator.
struct SchedulePlan {
    std::shared_ptr<const TaskGraph> graph;
    PlanConfig config;
    std::vector<std::vector<int>> per_device;        // node ids
    std::vector<std::vector<ScheduleUnit>> units;    // per device

    int device_count() const { return static_cast<int>(per_device.size()); }
};

// Early-backward schedule: stage s warms up with min(S-s, M) forwards,
// then alternates one backward / one forward, then drains backwards.
SchedulePlan plan_1f1b(std::shared_ptr<const TaskGraph> graph);

// Group-granularity 1F1B over consecutive micro-batch groups of size k
// (the last group may be short when k does not divide M). k=1 reproduces
// plan_1f1b, k=M reproduces plan_gpipe.
SchedulePlan plan_kfkb(std::shared_ptr<const TaskGraph> graph, int k);

// All forwards in micro-batch order, then all backwards.
SchedulePlan plan_gpipe(std::shared_ptr<const TaskGraph> graph);

// "F0 F1 B0 ..." rendering of a device's compute order, for tests and dumps.
std::string sequence_string(const SchedulePlan& plan, int device, bool include_grad_accum = false);

// Empty iff the plan satisfies its invariants: every compute node of the
// device appears exactly once, each device list is a linear extension of
// the projected task-graph dependencies, and matched Send/Recv pairs on a
// link keep the same relative order on both sides.
std::vector<std::string> check_plan(const SchedulePlan& plan);

}  // namespace pipetune
