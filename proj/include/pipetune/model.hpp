#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pipetune/time.hpp"

namespace pipetune {

using Bytes = std::int64_t;

enum class Direction { Forward, Backward };

// Inter-stage links are numbered per adjacent stage pair and direction:
// link 2*s carries forward activations stage s -> s+1, link 2*s+1 carries
// gradients stage s+1 -> s.
using LinkId = int;

inline LinkId forward_link(int lower_stage) { return 2 * lower_stage; }
inline LinkId backward_link(int lower_stage) { return 2 * lower_stage + 1; }
inline bool is_forward_link(LinkId link) { return link % 2 == 0; }
inline int link_source_stage(LinkId link) { return is_forward_link(link) ? link / 2 : link / 2 + 1; }
inline int link_dest_stage(LinkId link) { return is_forward_link(link) ? link / 2 + 1 : link / 2; }
inline int link_count(int stage_count) { return stage_count > 1 ? 2 * (stage_count - 1) : 0; }

// Per-stage cost model. Compute time is affine in the micro-batch size
// (fixed launch overhead plus a per-sample term), so smaller micro-batches
// pay proportionally more overhead. Byte counts are linear in batch size.
struct StageProfile {
    int stage_id = 0;
    double forward_fixed = 0.0;
    double forward_per_sample = 0.0;
    double backward_fixed = 0.0;
    double backward_per_sample = 0.0;
    Bytes weight_bytes = 0;
    Bytes activation_bytes_per_sample = 0;
    Bytes output_bytes_per_sample_fwd = 0;
    Bytes output_bytes_per_sample_bwd = 0;
};

struct ModelSpec {
    std::vector<StageProfile> stages;
    int global_batch = 1;

    int stage_count() const { return static_cast<int>(stages.size()); }

    // Throws ConfigError unless stage ids are contiguous, all costs are
    // non-negative and global_batch >= 1.
    void validate() const;
};

struct ClusterSpec {
    Bytes device_memory_limit = 0;
    int devices = 0;  // one stage per device

    void validate(int stage_count) const;
};

// A schedule-plan configuration: group member count k and micro-batch
// size b, with M = global_batch / b micro-batches.
struct PlanConfig {
    int k = 1;
    int micro_batch_size = 1;
    int micro_batch_count = 1;

    static PlanConfig make(int k, int micro_batch_size, int global_batch);

    bool operator==(const PlanConfig&) const = default;
};

double compute_duration(const StageProfile& stage, int batch, Direction dir);
Tick compute_duration_ticks(const StageProfile& stage, int batch, Direction dir);

// Bytes moved off-stage for one micro-batch in the given direction.
Bytes transfer_bytes(const StageProfile& stage, int batch, Direction dir);

std::vector<int> divisors_descending(int n);

}  // namespace pipetune
