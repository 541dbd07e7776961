#include "monoforge/trainloop.hpp"

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>

#include "monoforge/error.hpp"
#include "monoforge/monosem.hpp"

namespace monoforge {

namespace {

constexpr std::uint64_t kStreamTask = 1;
constexpr std::uint64_t kStreamInit = 2;
constexpr std::uint64_t kStreamMasks = 3;
constexpr std::uint64_t kStreamData = 4;

std::span<double> flat(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> flat(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> flat(const Matrix& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> flat(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

FeatureModel make_feature_model(std::size_t n, const FeatureDistConfig& dist) {
    if (dist.kind == FrequencyKind::Uniform) {
        return make_uniform(n, dist.eps);
    }
    return make_power_law(n, dist.exponent, dist.eps);
}

std::size_t TrainConfig::effective_batch_size() const {
    return batch_size == 0 ? batch_size_for(k) : batch_size;
}

std::size_t TrainConfig::effective_t_max() const {
    return schedule_t_max == 0 ? total_steps : schedule_t_max;
}

std::size_t TrainConfig::output_dim() const {
    return task == TaskKind::ReProjector ? d : n_features;
}

void validate(const TrainConfig& cfg) {
    if (cfg.n_features == 0 || cfg.d == 0 || cfg.k == 0) {
        throw ConfigError("n_features, d and k must be positive");
    }
    if (cfg.d > cfg.n_features) {
        throw ConfigError("d must not exceed n_features");
    }
    if (cfg.total_steps == 0) {
        throw ConfigError("total_steps must be at least 1");
    }
    if (cfg.eval_every == 0) {
        throw ConfigError("eval_every must be at least 1");
    }
    if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) {
        throw ConfigError("lr must be finite and non-negative");
    }
    if (!(cfg.connectivity_density > 0.0 && cfg.connectivity_density <= 1.0)) {
        throw ConfigError("connectivity_density must lie in (0, 1]");
    }
    if (!(cfg.init.bias_jitter >= 0.0)) {
        throw ConfigError("init.bias_jitter must be non-negative");
    }
    try {
        validate(cfg.reg);
        (void)make_feature_model(cfg.n_features, cfg.features);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

TrainerState initial_state(const TrainConfig& cfg) {
    validate(cfg);
    TrainerState s;
    s.config = cfg;
    s.task = make_task(cfg.task, cfg.n_features, cfg.d, derive_seed(cfg.seed, kStreamTask));

    InitConfig init = cfg.init;
    init.seed = derive_seed(cfg.seed, kStreamInit) ^ cfg.init.seed;
    const ModelDims dims{cfg.d, cfg.k, cfg.output_dim()};
    s.model = init_model(dims, cfg.activation, init);
    if (cfg.connectivity_density < 1.0) {
        auto [mask1, mask2] =
            make_er_masks(dims, cfg.connectivity_density, derive_seed(cfg.seed, kStreamMasks));
        apply_masks(s.model, std::move(mask1), std::move(mask2));
    }
    s.lamb = LambState::for_sizes({static_cast<std::size_t>(s.model.w1.size()),
                                   static_cast<std::size_t>(s.model.bias.size()),
                                   static_cast<std::size_t>(s.model.w2.size())});
    s.rng = Rng(derive_seed(cfg.seed, kStreamData));
    return s;
}

Trainer::Trainer(const TrainConfig& cfg) : Trainer(initial_state(cfg)) {}

Trainer::Trainer(TrainerState state)
    : state_(std::move(state)),
      features_(make_feature_model(state_.config.n_features, state_.config.features)),
      started_(std::chrono::steady_clock::now()) {
    validate(state_.config);
    validate_task(state_.task);
    const auto dims = state_.model.dims();
    if (dims.input != state_.config.d || dims.hidden != state_.config.k ||
        dims.output != state_.config.output_dim() ||
        state_.task.n_features() != state_.config.n_features ||
        state_.task.input_dim() != state_.config.d || state_.lamb.m.size() != 3) {
        throw DimensionError("trainer state does not match its configuration");
    }
}

TraceRecord Trainer::evaluate(double lr, double loss_value) const {
    const MonoReport rep = compute_r(probe_activations(state_.model, state_.task));
    TraceRecord rec;
    rec.step = state_.step;
    rec.lr = lr;
    rec.loss = loss_value;
    rec.mono_count = rep.mono_count();
    rec.mono_fraction = rep.mono_fraction();
    rec.mono_per_feature = rep.mono_per_feature();
    rec.mean_bias = state_.model.bias.size() == 0 ? 0.0 : state_.model.bias.mean();
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            started_)
                      .count();
    return rec;
}

void Trainer::step_once(double& lr_used, double& task_loss) {
    const TrainConfig& cfg = state_.config;
    ToyModel& model = state_.model;

    const SampleBatch batch =
        make_batch(state_.task, features_, cfg.effective_batch_size(), state_.rng);
    const ForwardTrace trace = forward(model, batch.inputs);
    task_loss = loss(state_.task, batch.targets, trace.output);
    if (!std::isfinite(task_loss)) {
        throw NonFiniteError("non-finite loss at step " + std::to_string(state_.step));
    }
    const Matrix grad_out = loss_grad(state_.task, batch.targets, trace.output);

    ParamGrads grads;
    if (cfg.reg.l1_coeff > 0.0) {
        const auto [penalty, hidden_grad] = l1_penalty(trace.hidden, cfg.reg.l1_coeff);
        if (!std::isfinite(penalty)) {
            throw NonFiniteError("non-finite L1 penalty at step " + std::to_string(state_.step));
        }
        grads = backward(model, trace, grad_out, &hidden_grad);
    } else {
        grads = backward(model, trace, grad_out);
    }

    lr_used = cosine_lr(Schedule{cfg.lr, cfg.effective_t_max()}, state_.step);
    const std::array<std::span<double>, 3> params{flat(model.w1), flat(model.bias),
                                                  flat(model.w2)};
    const std::array<std::span<const double>, 3> grad_views{flat(std::as_const(grads.w1)),
                                                            flat(std::as_const(grads.bias)),
                                                            flat(std::as_const(grads.w2))};
    const bool decay_now =
        cfg.reg.bias_decay_rate > 0.0 &&
        bias_decay_active(state_.step, cfg.total_steps, cfg.reg.decay_active_fraction);
    if (cfg.reg.decay_mode == BiasDecayMode::Lamb) {
        const std::array<double, 3> decay{0.0, decay_now ? cfg.reg.bias_decay_rate : 0.0, 0.0};
        lamb_step(params, grad_views, state_.lamb, lr_used, decay);
    } else {
        lamb_step(params, grad_views, state_.lamb, lr_used);
        model.bias = apply_bias_decay(model.bias, cfg.reg.bias_decay_rate, state_.step,
                                      cfg.total_steps, cfg.reg.decay_active_fraction);
    }
    if (!all_finite(model)) {
        throw NonFiniteError("non-finite parameters after step " + std::to_string(state_.step));
    }
    state_.step += 1;
}

RunOutcome Trainer::run(std::size_t steps, const TraceSink& sink) {
    RunOutcome out;
    const std::size_t eval_every = state_.config.eval_every;
    for (std::size_t i = 0; i < steps; ++i) {
        const ToyModel model_before = state_.model;
        const LambState lamb_before = state_.lamb;
        const Rng rng_before = state_.rng;
        double lr_used = 0.0;
        double task_loss = 0.0;
        try {
            step_once(lr_used, task_loss);
        } catch (const NonFiniteError& e) {
            state_.model = model_before;
            state_.lamb = lamb_before;
            state_.rng = rng_before;
            out.diverged = true;
            out.message = e.what();
            return out;
        }
        if (state_.step % eval_every == 0 || state_.step == state_.config.total_steps ||
            i + 1 == steps) {
            out.trace.push_back(evaluate(lr_used, task_loss));
            if (sink) {
                sink(out.trace.back());
            }
        }
    }
    return out;
}

TrainResult train(const TrainConfig& cfg, const TraceSink& sink) {
    Trainer trainer(cfg);
    RunOutcome outcome = trainer.run(cfg.total_steps, sink);
    TrainResult result;
    result.model = trainer.state().model;
    result.trace = std::move(outcome.trace);
    result.diverged = outcome.diverged;
    result.message = std::move(outcome.message);
    result.final_state = trainer.state();
    return result;
}

TrainResult resume(const TrainerState& state, std::size_t extra_steps, const TraceSink& sink) {
    Trainer trainer(state);
    RunOutcome outcome = trainer.run(extra_steps, sink);
    TrainResult result;
    result.model = trainer.state().model;
    result.trace = std::move(outcome.trace);
    result.diverged = outcome.diverged;
    result.message = std::move(outcome.message);
    result.final_state = trainer.state();
    return result;
}

}  // namespace monoforge
