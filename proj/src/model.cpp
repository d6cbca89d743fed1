#include "pipetune/model.hpp"

#include "pipetune/errors.hpp"

namespace pipetune {

void ModelSpec::validate() const {
    if (stages.empty()) throw ConfigError("model needs at least one stage");
    if (global_batch < 1) throw ConfigError("global_batch must be >= 1");
    for (int s = 0; s < stage_count(); ++s) {
        const StageProfile& st = stages[s];
        if (st.stage_id != s)
            throw ConfigError("stage ids must be contiguous from 0; stage " + std::to_string(s) +
                              " has id " + std::to_string(st.stage_id));
        if (st.forward_fixed < 0 || st.forward_per_sample < 0 || st.backward_fixed < 0 ||
            st.backward_per_sample < 0)
            throw ConfigError("stage " + std::to_string(s) + " has a negative duration");
        if (st.weight_bytes < 0 || st.activation_bytes_per_sample < 0 ||
            st.output_bytes_per_sample_fwd < 0 || st.output_bytes_per_sample_bwd < 0)
            throw ConfigError("stage " + std::to_string(s) + " has a negative byte count");
    }
}

void ClusterSpec::validate(int stage_count) const {
    if (device_memory_limit <= 0) throw ConfigError("device_memory_limit must be positive");
    if (devices != stage_count)
        throw ConfigError("cluster has " + std::to_string(devices) + " devices but the model has " +
                          std::to_string(stage_count) + " stages (one stage per device)");
}

PlanConfig PlanConfig::make(int k, int micro_batch_size, int global_batch) {
    if (micro_batch_size < 1) throw ConfigError("micro_batch_size must be >= 1");
    if (global_batch % micro_batch_size != 0)
        throw ConfigError("micro_batch_size " + std::to_string(micro_batch_size) +
                          " does not divide global_batch " + std::to_string(global_batch));
    const int m = global_batch / micro_batch_size;
    if (k < 1 || k > m)
        throw PlanError("group member count k=" + std::to_string(k) + " outside [1, M=" +
                        std::to_string(m) + "]");
    return PlanConfig{k, micro_batch_size, m};
}

double compute_duration(const StageProfile& stage, int batch, Direction dir) {
    if (dir == Direction::Forward)
        return stage.forward_fixed + static_cast<double>(batch) * stage.forward_per_sample;
    return stage.backward_fixed + static_cast<double>(batch) * stage.backward_per_sample;
}

Tick compute_duration_ticks(const StageProfile& stage, int batch, Direction dir) {
    return to_ticks(compute_duration(stage, batch, dir));
}

Bytes transfer_bytes(const StageProfile& stage, int batch, Direction dir) {
    const Bytes per_sample = dir == Direction::Forward ? stage.output_bytes_per_sample_fwd
                                                       : stage.output_bytes_per_sample_bwd;
    return per_sample * static_cast<Bytes>(batch);
}

std::vector<int> divisors_descending(int n) {
    std::vector<int> out;
    for (int d = n; d >= 1; --d)
        if (n % d == 0) out.push_back(d);
    return out;
}

}  // namespace pipetune
