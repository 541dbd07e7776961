#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "monoforge/features.hpp"
#include "monoforge/model.hpp"
#include "monoforge/optim.hpp"
#include "monoforge/rng.hpp"
#include "monoforge/tasks.hpp"

namespace monoforge {

struct FeatureDistConfig {
    FrequencyKind kind = FrequencyKind::Uniform;
    double eps = 1.0 / 64.0;  // mean frequency for PowerLaw
    double exponent = 1.1;    // PowerLaw only
};

FeatureModel make_feature_model(std::size_t n, const FeatureDistConfig& dist);

struct TrainConfig {
    TaskKind task = TaskKind::Decoder;
    std::size_t n_features = 128;
    std::size_t d = 32;
    std::size_t k = 256;
    FeatureDistConfig features;
    Activation activation = Activation::ReLU;
    double lr = 0.007;
    std::size_t total_steps = 512;
    std::size_t schedule_t_max = 0;  // 0: anneal over total_steps
    std::size_t batch_size = 4096;   // 0: use batch_size_for(k)
    InitConfig init;
    RegConfig reg;
    double connectivity_density = 1.0;  // < 1 enables Erdos-Renyi masks
    std::size_t eval_every = 8;
    std::uint64_t seed = 0;

    std::size_t effective_batch_size() const;
    std::size_t effective_t_max() const;
    std::size_t output_dim() const;
};

void validate(const TrainConfig& cfg);

struct TraceRecord {
    std::size_t step = 0;
    double lr = 0.0;
    double loss = 0.0;
    double mono_fraction = 0.0;
    std::size_t mono_count = 0;
    double mono_per_feature = 0.0;
    double mean_bias = 0.0;
    double wall_ms = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Everything needed to continue a run bit-exactly.
struct TrainerState {
    TrainConfig config;
    std::size_t step = 0;
    TaskInstance task;
    ToyModel model;
    LambState lamb;
    Rng rng;
};

/// Fresh state: projections, masks and initial weights derived from cfg.seed.
TrainerState initial_state(const TrainConfig& cfg);

struct RunOutcome {
    std::vector<TraceRecord> trace;
    bool diverged = false;
    std::string message;
};

/// Owns one training run. Single-threaded; deterministic for a fixed state.
class Trainer {
public:
    explicit Trainer(const TrainConfig& cfg);
    explicit Trainer(TrainerState state);

    /// Runs up to `steps` optimization steps. On a non-finite loss, gradient or
    /// parameter the offending step is rolled back and the outcome is marked diverged.
    RunOutcome run(std::size_t steps, const TraceSink& sink = {});

    const TrainerState& state() const { return state_; }

    /// Runs the single-feature probe and summarizes the current model.
    TraceRecord evaluate(double lr, double loss) const;

private:
    void step_once(double& lr_used, double& task_loss);

    TrainerState state_;
    FeatureModel features_;
    std::chrono::steady_clock::time_point started_;
};

struct TrainResult {
    ToyModel model;
    std::vector<TraceRecord> trace;
    bool diverged = false;
    std::string message;
    TrainerState final_state;
};

TrainResult train(const TrainConfig& cfg, const TraceSink& sink = {});

/// Continues from a saved state for `extra_steps` further steps.
TrainResult resume(const TrainerState& state, std::size_t extra_steps, const TraceSink& sink = {});

}  // namespace monoforge
