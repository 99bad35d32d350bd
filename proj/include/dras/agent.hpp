#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/cluster.hpp"
#include "dras/matrix.hpp"
#include "dras/neuralnet.hpp"
#include "dras/policies.hpp"
#include "dras/reward.hpp"
#include "dras/rng.hpp"
#include "dras/simulator.hpp"

namespace dras {

enum class AgentKind { pg, dql };

struct AgentConfig {
    AgentKind kind = AgentKind::pg;
    int window = 10; // W
    RewardKind reward_kind = RewardKind::capability;
    RewardWeights weights;
    double gamma = 1.0;
    double alpha = 0.001;
    int update_every = 10; // scheduling instances per parameter update
    double eps0 = 1.0;
    double eps_decay = 0.995;
    double eps_min = 0.01;
    double time_scale = 86400.0; // max job length of the system
    double size_scale = 64.0;    // total node count
    std::size_t h1 = 128;
    std::size_t h2 = 32;
    bool no_reservation = false; // RL baseline: immediate execution only

    void validate() const {
        if (window < 1)
            throw std::invalid_argument("agent config: window < 1");
        if (update_every < 1)
            throw std::invalid_argument("agent config: update_every < 1");
        if (!(0.0 <= eps_min && eps_min <= eps0 && eps0 <= 1.0))
            throw std::invalid_argument("agent config: need 0 <= eps_min <= eps0 <= 1");
        if (!(0.0 < eps_decay && eps_decay <= 1.0))
            throw std::invalid_argument("agent config: need 0 < eps_decay <= 1");
        if (gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("agent config: gamma outside [0,1]");
    }
};

inline double epsilon_at(std::uint64_t update_index, const AgentConfig& cfg) {
    return std::max(cfg.eps_min, cfg.eps0 * std::pow(cfg.eps_decay, static_cast<double>(update_index)));
}

// --- state encoding ---------------------------------------------------------

// Window encoding: job slot i occupies rows 2i..2i+1 as
//   [size/size_scale, estimate/time_scale]
//   [priority,        queued_time/time_scale]
// empty slots stay zero with the mask false; rows 2W.. hold the node pairs
// [available, remaining/time_scale].
inline Matrix encode_pg_state(const std::vector<JobView>& window_jobs, const std::vector<NodeView>& nodes,
                              const AgentConfig& cfg, std::vector<std::uint8_t>& valid_mask) {
    std::size_t w = static_cast<std::size_t>(cfg.window);
    if (window_jobs.size() > w)
        throw std::runtime_error("contract violation: more jobs than window slots");
    Matrix m(2 * w + nodes.size(), 2);
    valid_mask.assign(w, 0);
    for (std::size_t i = 0; i < window_jobs.size(); ++i) {
        const JobView& j = window_jobs[i];
        m(2 * i, 0) = static_cast<double>(j.size) / cfg.size_scale;
        m(2 * i, 1) = j.estimate / cfg.time_scale;
        m(2 * i + 1, 0) = static_cast<double>(j.priority);
        m(2 * i + 1, 1) = j.queued_time / cfg.time_scale;
        valid_mask[i] = 1;
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        m(2 * w + k, 0) = static_cast<double>(nodes[k].available);
        m(2 * w + k, 1) = nodes[k].remaining / cfg.time_scale;
    }
    return m;
}

// Single-job encoding for the q head: one job slot, then the node pairs.
inline Matrix encode_dql_state(const JobView& job, const std::vector<NodeView>& nodes, const AgentConfig& cfg) {
    Matrix m(2 + nodes.size(), 2);
    m(0, 0) = static_cast<double>(job.size) / cfg.size_scale;
    m(0, 1) = job.estimate / cfg.time_scale;
    m(1, 0) = static_cast<double>(job.priority);
    m(1, 1) = job.queued_time / cfg.time_scale;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        m(2 + k, 0) = static_cast<double>(nodes[k].available);
        m(2 + k, 1) = nodes[k].remaining / cfg.time_scale;
    }
    return m;
}

// --- learning memory --------------------------------------------------------

struct Transition {
    Matrix state;                   // PG: window+nodes encoding; DQL: chosen job encoding
    std::vector<std::uint8_t> mask; // PG: valid window slots
    int action = 0;                 // window slot index
    double reward = 0.0;
    bool done = false;                   // DQL: no successor state
    std::vector<Matrix> own_candidates;  // DQL: all candidate encodings at this step
    std::vector<Matrix> next_candidates; // DQL: candidate encodings at the next step
};

// Running mean of returns per step index within an update batch, across all
// past updates. Queries beyond the recorded depth return the deepest mean.
class BaselineStore {
public:
    double value_at(std::size_t step) const {
        if (means_.empty())
            return 0.0;
        return means_[std::min(step, means_.size() - 1)];
    }

    void record(const std::vector<double>& returns) {
        if (returns.size() > means_.size()) {
            means_.resize(returns.size(), 0.0);
            counts_.resize(returns.size(), 0);
        }
        for (std::size_t k = 0; k < returns.size(); ++k) {
            counts_[k] += 1;
            means_[k] += (returns[k] - means_[k]) / static_cast<double>(counts_[k]);
        }
    }

    const std::vector<double>& means() const { return means_; }

private:
    std::vector<double> means_;
    std::vector<std::uint64_t> counts_;
};

// --- parameter updates ------------------------------------------------------

// REINFORCE with a per-step baseline: one ascending Adam step on
// sum_k grad log pi(s_k, a_k) * (G_k - b_k), then the baseline absorbs the
// batch returns.
inline void pg_update(NetworkParams& params, AdamState& adam, const std::vector<Transition>& batch,
                      BaselineStore& baseline, double alpha, double gamma) {
    if (batch.empty())
        return;
    std::size_t k_total = batch.size();
    std::vector<double> returns(k_total);
    double acc = 0.0;
    for (std::size_t k = k_total; k-- > 0;) {
        acc = batch[k].reward + gamma * acc;
        returns[k] = acc;
    }

    NetworkParams grad_acc = zeros_like(params);
    for (std::size_t k = 0; k < k_total; ++k) {
        const Transition& t = batch[k];
        double advantage = returns[k] - baseline.value_at(k);
        ForwardCache cache = forward(params, t.state, t.mask);
        std::vector<double> dlogits(params.out, 0.0);
        for (std::size_t j = 0; j < params.out; ++j)
            if (t.mask[j])
                dlogits[j] = -cache.probs[j] * advantage;
        dlogits[static_cast<std::size_t>(t.action)] += advantage;
        NetworkParams g = backward(params, cache, dlogits);
        std::vector<std::span<double>> acc_blocks;
        for_each_block(grad_acc, [&](std::span<double> b) { acc_blocks.push_back(b); });
        std::size_t bi = 0;
        for_each_block(g, [&](std::span<const double> b) {
            for (std::size_t i = 0; i < b.size(); ++i)
                acc_blocks[bi][i] += b[i];
            ++bi;
        });
    }
    adam_step(params, grad_acc, adam, alpha, StepDirection::ascend);
    baseline.record(returns);
}

// One descending Adam step on the squared temporal-difference error
// 1/2 sum_k (y_k - Q(s_k,a_k))^2 with y_k = r_k + gamma * max_a Q(s_{k+1},a)
// held constant (0 successors for done transitions).
inline void dql_update(NetworkParams& params, AdamState& adam, const std::vector<Transition>& batch,
                       double alpha, double gamma) {
    if (batch.empty())
        return;
    NetworkParams grad_acc = zeros_like(params);
    for (const Transition& t : batch) {
        double target = t.reward;
        if (!t.done) {
            double best_next = -std::numeric_limits<double>::infinity();
            for (const Matrix& cand : t.next_candidates)
                best_next = std::max(best_next, forward(params, cand).logits[0]);
            if (t.next_candidates.empty())
                best_next = 0.0;
            target += gamma * best_next;
        }
        ForwardCache cache = forward(params, t.state);
        double q = cache.logits[0];
        NetworkParams g = backward(params, cache, {q - target});
        std::vector<std::span<double>> acc_blocks;
        for_each_block(grad_acc, [&](std::span<double> b) { acc_blocks.push_back(b); });
        std::size_t bi = 0;
        for_each_block(g, [&](std::span<const double> b) {
            for (std::size_t i = 0; i < b.size(); ++i)
                acc_blocks[bi][i] += b[i];
            ++bi;
        });
    }
    adam_step(params, grad_acc, adam, alpha, StepDirection::descend);
}

// --- the scheduling agent ----------------------------------------------------

// Two-level decision procedure: level 1 selects window jobs for immediate or
// reserved execution; after a reservation, level 2 selects backfill jobs from
// the candidate window with the same network until no candidate remains.
class DrasAgent final : public SchedulerPolicy {
public:
    enum class Mode { training, frozen };

    DrasAgent(AgentConfig cfg, NetworkParams params, AdamState adam, int n_nodes)
        : cfg_(cfg), params_(std::move(params)), adam_(std::move(adam)), n_nodes_(n_nodes) {
        cfg_.validate();
        check_geometry();
        eps_ = epsilon_at(0, cfg_);
    }

    static DrasAgent make(AgentConfig cfg, int n_nodes, std::uint64_t init_seed) {
        cfg.validate();
        std::size_t conv_rows = cfg.kind == AgentKind::pg
                                    ? 2 * static_cast<std::size_t>(cfg.window) + static_cast<std::size_t>(n_nodes)
                                    : 2 + static_cast<std::size_t>(n_nodes);
        std::size_t out = cfg.kind == AgentKind::pg ? static_cast<std::size_t>(cfg.window) : 1;
        HeadKind head = cfg.kind == AgentKind::pg ? HeadKind::policy : HeadKind::q;
        NetworkParams params = make_network(head, conv_rows, cfg.h1, cfg.h2, out);
        Rng rng(init_seed);
        init_weights(params, rng);
        AdamState adam = make_adam_state(params);
        return DrasAgent(cfg, std::move(params), std::move(adam), n_nodes);
    }

    void set_mode(Mode m) { mode_ = m; }
    Mode mode() const { return mode_; }

    // Degenerate selector used by equivalence tests: always take the first
    // valid window slot instead of consulting the network.
    void set_force_first_slot(bool v) { force_first_slot_ = v; }

    const AgentConfig& config() const { return cfg_; }
    const NetworkParams& params() const { return params_; }
    const AdamState& adam() const { return adam_; }
    const BaselineStore& baseline() const { return baseline_; }
    double epsilon() const { return eps_; }
    std::uint64_t updates_done() const { return updates_done_; }
    const std::vector<Transition>& memory() const { return memory_; }

    struct InstanceOutcome {
        std::vector<ScheduleAction> actions;
        std::vector<Transition> transitions;
    };

    // One scheduling instance over the planning cluster copy.
    InstanceOutcome schedule_instance(const std::vector<const Job*>& queue, ClusterState& cluster, Rng& rng) {
        InstanceOutcome out;
        if (queue.empty())
            return out;

        std::vector<const Job*> waiting(queue);
        std::vector<const Job*> selected;
        double now = cluster.now();

        auto record = [&](const Job* job, ExecMode mode, double start, Selection&& sel) {
            out.actions.push_back({job->id, mode, start});
            selected.push_back(job);
            Transition t;
            t.state = std::move(sel.state);
            t.mask = std::move(sel.mask);
            t.action = sel.slot;
            t.own_candidates = std::move(sel.candidates);
            RewardContext ctx{selected, waiting, n_nodes_ - cluster.free_count(), n_nodes_, now};
            t.reward = compute_reward(cfg_.reward_kind, cfg_.weights, ctx, cfg_.time_scale);
            out.transitions.push_back(std::move(t));
        };

        // level 1: immediate or reserved execution
        bool reserved = false;
        while (!waiting.empty()) {
            std::size_t w = std::min<std::size_t>(cfg_.window, waiting.size());
            std::vector<const Job*> window(waiting.begin(), waiting.begin() + static_cast<std::ptrdiff_t>(w));
            std::optional<Selection> sel = select(window, cluster, rng, cfg_.no_reservation);
            if (!sel)
                break; // no-reservation agent with nothing runnable in the window
            const Job* job = window[static_cast<std::size_t>(sel->slot)];
            if (job->size <= cluster.free_count()) {
                cluster.occupy_lowest_free(job->size, now + job->runtime_estimate);
                waiting.erase(std::find(waiting.begin(), waiting.end(), job));
                record(job, ExecMode::ready, now, std::move(*sel));
                continue;
            }
            ReservationPlan plan = earliest_reservation_time(cluster, *job);
            cluster.set_reservation(Reservation{job->id, plan.start_time, job->size});
            record(job, ExecMode::reserved, plan.start_time, std::move(*sel));
            reserved = true;
            break;
        }

        // level 2: backfilling against the reservation
        while (reserved) {
            std::vector<const Job*> candidates = backfill_candidates(cluster, waiting, now);
            if (candidates.empty())
                break;
            std::size_t w = std::min<std::size_t>(cfg_.window, candidates.size());
            std::vector<const Job*> window(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(w));
            std::optional<Selection> sel = select(window, cluster, rng, false);
            const Job* job = window[static_cast<std::size_t>(sel->slot)];
            cluster.occupy_lowest_free(job->size, now + job->runtime_estimate);
            waiting.erase(std::find(waiting.begin(), waiting.end(), job));
            record(job, ExecMode::backfilled, now, std::move(*sel));
        }
        return out;
    }

    std::vector<ScheduleAction> decide(const std::vector<const Job*>& queue, ClusterState cluster,
                                       Rng& rng) override {
        InstanceOutcome out = schedule_instance(queue, cluster, rng);
        if (mode_ == Mode::training && !out.transitions.empty()) {
            absorb(std::move(out.transitions));
            if (++instances_since_update_ >= cfg_.update_every) {
                run_update();
                instances_since_update_ = 0;
            }
        }
        return std::move(out.actions);
    }

    void on_episode_end() override {
        if (mode_ == Mode::training) {
            if (pending_) {
                pending_->done = true;
                memory_.push_back(std::move(*pending_));
                pending_.reset();
            }
            run_update(); // flush the partial batch
        }
        pending_.reset();
        instances_since_update_ = 0;
    }

    void save(const std::string& path) const { save_model(params_, adam_, path); }

private:
    struct Selection {
        int slot = 0;
        Matrix state;                   // PG window encoding / DQL chosen encoding
        std::vector<std::uint8_t> mask; // PG
        std::vector<Matrix> candidates; // DQL
    };

    void check_geometry() const {
        std::size_t want_rows = cfg_.kind == AgentKind::pg
                                    ? 2 * static_cast<std::size_t>(cfg_.window) + static_cast<std::size_t>(n_nodes_)
                                    : 2 + static_cast<std::size_t>(n_nodes_);
        HeadKind want_head = cfg_.kind == AgentKind::pg ? HeadKind::policy : HeadKind::q;
        std::size_t want_out = cfg_.kind == AgentKind::pg ? static_cast<std::size_t>(cfg_.window) : 1;
        if (params_.head != want_head || params_.conv_rows != want_rows || params_.out != want_out)
            throw std::runtime_error("configuration error: model head or geometry does not match the agent config");
    }

    std::optional<Selection> select(const std::vector<const Job*>& window, const ClusterState& cluster, Rng& rng,
                                    bool runnable_only) {
        auto [job_views, node_views] = scheduling_view(cluster, window, cluster.now());

        Selection sel;
        if (cfg_.kind == AgentKind::pg) {
            sel.state = encode_pg_state(job_views, node_views, cfg_, sel.mask);
            if (runnable_only) {
                int free = cluster.free_count();
                for (std::size_t i = 0; i < window.size(); ++i)
                    if (window[i]->size > free)
                        sel.mask[i] = 0;
            }
            if (std::find(sel.mask.begin(), sel.mask.end(), 1) == sel.mask.end())
                return std::nullopt;
            ForwardCache cache = forward(params_, sel.state, sel.mask);
            sel.slot = force_first_slot_ ? first_valid(sel.mask)
                       : mode_ == Mode::frozen ? argmax_masked(cache.probs, sel.mask)
                                               : sample_masked(cache.probs, sel.mask, rng);
        } else {
            std::vector<std::uint8_t> usable(window.size(), 1);
            if (runnable_only) {
                int free = cluster.free_count();
                for (std::size_t i = 0; i < window.size(); ++i)
                    if (window[i]->size > free)
                        usable[i] = 0;
            }
            if (std::find(usable.begin(), usable.end(), 1) == usable.end())
                return std::nullopt;
            sel.candidates.reserve(window.size());
            std::vector<double> q(window.size(), -std::numeric_limits<double>::infinity());
            for (std::size_t i = 0; i < window.size(); ++i) {
                sel.candidates.push_back(encode_dql_state(job_views[i], node_views, cfg_));
                if (usable[i])
                    q[i] = forward(params_, sel.candidates.back()).logits[0];
            }
            double eps = mode_ == Mode::frozen ? cfg_.eps_min : eps_;
            if (force_first_slot_) {
                sel.slot = first_valid(usable);
            } else if (rng.uniform() < eps) {
                std::vector<int> pool;
                for (std::size_t i = 0; i < usable.size(); ++i)
                    if (usable[i])
                        pool.push_back(static_cast<int>(i));
                sel.slot = pool[rng.uniform_index(pool.size())];
            } else {
                sel.slot = argmax_masked(q, usable);
            }
            sel.state = sel.candidates[static_cast<std::size_t>(sel.slot)];
        }
        return sel;
    }

    static int first_valid(const std::vector<std::uint8_t>& mask) {
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i])
                return static_cast<int>(i);
        throw std::logic_error("internal error: empty mask in selection");
    }

    static int argmax_masked(const std::vector<double>& v, const std::vector<std::uint8_t>& mask) {
        int best = -1;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!mask[i])
                continue;
            if (best < 0 || v[i] > v[static_cast<std::size_t>(best)])
                best = static_cast<int>(i);
        }
        if (best < 0)
            throw std::logic_error("internal error: empty mask in selection");
        return best;
    }

    static int sample_masked(const std::vector<double>& probs, const std::vector<std::uint8_t>& mask, Rng& rng) {
        double u = rng.uniform();
        double acc = 0.0;
        int last_valid = -1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (!mask[i])
                continue;
            last_valid = static_cast<int>(i);
            acc += probs[i];
            if (u < acc)
                return static_cast<int>(i);
        }
        if (last_valid < 0)
            throw std::logic_error("internal error: empty mask in selection");
        return last_valid;
    }

    void absorb(std::vector<Transition>&& transitions) {
        for (Transition& t : transitions) {
            if (cfg_.kind == AgentKind::dql) {
                if (pending_) {
                    pending_->next_candidates = t.own_candidates;
                    memory_.push_back(std::move(*pending_));
                }
                pending_ = std::move(t);
            } else {
                memory_.push_back(std::move(t));
            }
        }
    }

    void run_update() {
        if (memory_.empty())
            return;
        if (cfg_.kind == AgentKind::pg)
            pg_update(params_, adam_, memory_, baseline_, cfg_.alpha, cfg_.gamma);
        else
            dql_update(params_, adam_, memory_, cfg_.alpha, cfg_.gamma);
        memory_.clear();
        ++updates_done_;
        eps_ = epsilon_at(updates_done_, cfg_);
    }

    AgentConfig cfg_;
    NetworkParams params_;
    AdamState adam_;
    BaselineStore baseline_;
    int n_nodes_;
    Mode mode_ = Mode::training;
    bool force_first_slot_ = false;
    double eps_ = 1.0;
    std::uint64_t updates_done_ = 0;
    int instances_since_update_ = 0;
    std::vector<Transition> memory_;
    std::optional<Transition> pending_; // DQL transition awaiting its successor
};

} // namespace dras
