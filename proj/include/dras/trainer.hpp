#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/agent.hpp"
#include "dras/metrics.hpp"
#include "dras/workload.hpp"

namespace dras {

enum class CurriculumPhase { sampled, real, synthetic };

inline const char* to_string(CurriculumPhase p) {
    switch (p) {
    case CurriculumPhase::sampled: return "sampled";
    case CurriculumPhase::real: return "real";
    case CurriculumPhase::synthetic: return "synthetic";
    }
    return "?";
}

struct Curriculum {
    std::vector<std::pair<CurriculumPhase, JobSet>> entries; // sampled, then real, then synthetic
};

// Three-phase training jobsets: sampled replicas of the trace, equal time
// slices of the trace itself, then synthetic sets regenerated from its
// statistics.
inline Curriculum build_curriculum(const JobSet& trace, int n_sampled, int n_real, int n_synthetic,
                                   std::size_t jobs_per_set, std::uint64_t seed) {
    if (trace.jobs.empty())
        throw std::invalid_argument("build_curriculum: empty training trace");
    if (n_sampled < 0 || n_real < 0 || n_synthetic < 0)
        throw std::invalid_argument("build_curriculum: negative phase count");

    Curriculum cur;
    for (int i = 0; i < n_sampled; ++i)
        cur.entries.emplace_back(CurriculumPhase::sampled,
                                 sample_jobset(trace, jobs_per_set, mix_seed(seed, 100 + static_cast<std::uint64_t>(i)),
                                               "sampled_" + std::to_string(i)));

    if (n_real > 0) {
        double span = trace.jobs.back().submit_time - trace.jobs.front().submit_time;
        if (n_real > 1 && span <= 0.0)
            throw std::runtime_error("build_curriculum: trace spans no time, cannot cut " +
                                     std::to_string(n_real) + " real jobsets");
        std::vector<double> boundaries;
        for (int k = 1; k < n_real; ++k)
            boundaries.push_back(trace.jobs.front().submit_time + span * static_cast<double>(k) /
                                                                      static_cast<double>(n_real));
        std::vector<JobSet> parts = split_jobset(trace, boundaries);
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (parts[p].jobs.empty())
                throw std::runtime_error("build_curriculum: real-phase slice " + std::to_string(p) +
                                         " is empty; the trace does not span " + std::to_string(n_real) +
                                         " jobsets");
            parts[p].label = "real_" + std::to_string(p);
            cur.entries.emplace_back(CurriculumPhase::real, std::move(parts[p]));
        }
    }

    if (n_synthetic > 0) {
        WorkloadStats stats = compute_stats(trace);
        for (int i = 0; i < n_synthetic; ++i)
            cur.entries.emplace_back(CurriculumPhase::synthetic,
                                     synthesize_jobset(stats, jobs_per_set,
                                                       mix_seed(seed, 300 + static_cast<std::uint64_t>(i)),
                                                       "synthetic_" + std::to_string(i)));
    }
    return cur;
}

struct EpisodeReport {
    int episode = 0; // 1-based
    CurriculumPhase phase = CurriculumPhase::sampled;
    double total_reward = 0.0;
    double wall_time_seconds = 0.0; // informational only, never serialized
    double epsilon = 0.0;
    std::string snapshot_path;
};

struct TrainingReport {
    std::vector<EpisodeReport> episodes;
};

struct TrainResult {
    NetworkParams params;
    AdamState adam;
    TrainingReport report;
};

namespace detail {

inline TrainResult train_loop(DrasAgent& agent, const Curriculum& curriculum, int n_nodes, std::uint64_t seed,
                              const std::string& snapshot_dir, int epochs) {
    if (curriculum.entries.empty())
        throw std::invalid_argument("train: empty curriculum");
    if (epochs < 1)
        throw std::invalid_argument("train: epochs < 1");

    const AgentConfig& cfg = agent.config();
    agent.set_mode(DrasAgent::Mode::training);
    RewardFn reward_fn = make_reward_fn(cfg.reward_kind, cfg.weights, cfg.time_scale);

    TrainResult out;
    int episode = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (const auto& [phase, jobset] : curriculum.entries) {
            ++episode;
            auto t0 = std::chrono::steady_clock::now();
            SimulationResult sim;
            try {
                sim = run_simulation(jobset, agent, n_nodes, mix_seed(seed, 1000 + static_cast<std::uint64_t>(episode)),
                                     reward_fn);
            } catch (const std::exception& e) {
                throw std::runtime_error("episode " + std::to_string(episode) + ": " + e.what());
            }
            agent.on_episode_end();

            EpisodeReport rep;
            rep.episode = episode;
            rep.phase = phase;
            rep.total_reward = sim.total_reward;
            rep.epsilon = agent.epsilon();
            rep.wall_time_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (!snapshot_dir.empty()) {
                rep.snapshot_path = snapshot_dir + "/snapshot_ep" + std::to_string(episode) + ".model";
                agent.save(rep.snapshot_path);
            }
            out.report.episodes.push_back(std::move(rep));
        }
    }
    out.params = agent.params();
    out.adam = agent.adam();
    return out;
}

} // namespace detail

// Episodic training over the curriculum from a fresh seeded network. Each
// episode starts from an idle cluster, runs one jobset to completion with the
// learning agent as policy, and ends with a model snapshot. `epochs` repeats
// the whole curriculum.
inline TrainResult train(const AgentConfig& cfg, const Curriculum& curriculum, int n_nodes, std::uint64_t seed,
                         const std::string& snapshot_dir = "", int epochs = 1) {
    DrasAgent agent = DrasAgent::make(cfg, n_nodes, mix_seed(seed, 0xA9E17));
    return detail::train_loop(agent, curriculum, n_nodes, seed, snapshot_dir, epochs);
}

// Same loop, but resuming from a saved model (parameters and optimizer moments).
inline TrainResult train_from(const AgentConfig& cfg, LoadedModel init, const Curriculum& curriculum, int n_nodes,
                              std::uint64_t seed, const std::string& snapshot_dir = "", int epochs = 1) {
    DrasAgent agent(cfg, std::move(init.params), std::move(init.adam), n_nodes);
    return detail::train_loop(agent, curriculum, n_nodes, seed, snapshot_dir, epochs);
}

// Convergence is reported, not auto-detected; this helper flags the first
// episode whose trailing window of per-episode total rewards moved by less
// than rel_change relative to its mean. Purely a convenience for operators
// picking a snapshot.
inline std::optional<int> find_plateau_episode(const TrainingReport& report, std::size_t window = 5,
                                               double rel_change = 0.01) {
    if (window < 2 || report.episodes.size() < window)
        return std::nullopt;
    for (std::size_t end = window; end <= report.episodes.size(); ++end) {
        double lo = report.episodes[end - window].total_reward;
        double hi = lo, mean = 0.0;
        for (std::size_t i = end - window; i < end; ++i) {
            double r = report.episodes[i].total_reward;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            mean += r / static_cast<double>(window);
        }
        if (std::fabs(mean) > 0.0 && (hi - lo) / std::fabs(mean) < rel_change)
            return report.episodes[end - 1].episode;
    }
    return std::nullopt;
}

struct ValidationResult {
    double total_reward = 0.0;
    MetricsSummary metrics;
};

// Runs a frozen model on a jobset: PG picks the argmax-probability job, DQL
// runs at its exploration floor. No parameter updates happen.
inline ValidationResult validate(const NetworkParams& model, const JobSet& jobset, int n_nodes,
                                 const AgentConfig& cfg, std::uint64_t seed, bool force_first_slot = false) {
    DrasAgent agent(cfg, model, make_adam_state(model), n_nodes);
    agent.set_mode(DrasAgent::Mode::frozen);
    agent.set_force_first_slot(force_first_slot);
    RewardFn reward_fn = make_reward_fn(cfg.reward_kind, cfg.weights, cfg.time_scale);
    SimulationResult sim = run_simulation(jobset, agent, n_nodes, seed, reward_fn);

    ValidationResult out;
    out.total_reward = sim.total_reward;
    out.metrics = compute_metrics(sim, n_nodes);
    return out;
}

} // namespace dras
