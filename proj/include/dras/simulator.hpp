#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/cluster.hpp"
#include "dras/job.hpp"
#include "dras/rng.hpp"

namespace dras {

enum class ExecMode { ready, reserved, backfilled };

inline const char* to_string(ExecMode m) {
    switch (m) {
    case ExecMode::ready: return "ready";
    case ExecMode::reserved: return "reserved";
    case ExecMode::backfilled: return "backfilled";
    }
    return "?";
}

// One job selection. ready/backfilled start at the current simulation time;
// reserved carries the planned future start.
struct ScheduleAction {
    std::int64_t job_id = 0;
    ExecMode mode = ExecMode::ready;
    double start_time = 0.0;
};

// Inputs for per-action reward computation. `selected` covers all jobs
// selected so far within the current scheduling instance, the current one
// included; `queue` is what still waits after the action.
struct RewardContext {
    const std::vector<const Job*>& selected;
    const std::vector<const Job*>& queue;
    int nodes_used = 0; // after applying the action
    int total_nodes = 0;
    double now = 0.0;
};

using RewardFn = std::function<double(const RewardContext&)>;

// Scheduling policy contract. decide() is called once per event batch with
// the wait queue in arrival order and a private planning copy of the cluster
// (its reservation cleared; reservations are non-binding and recomputed every
// instance). Implementations must not retain references past the call.
class SchedulerPolicy {
public:
    virtual ~SchedulerPolicy() = default;
    virtual std::vector<ScheduleAction> decide(const std::vector<const Job*>& queue, ClusterState cluster,
                                               Rng& rng) = 0;
    virtual void on_episode_end() {}
};

struct JobView {
    int size = 0;
    double estimate = 0.0;
    int priority = 0;
    double queued_time = 0.0;
};

struct NodeView {
    int available = 0;
    double remaining = 0.0;
};

// Fixed per-job / per-node observation tuples the encoders consume.
inline std::pair<std::vector<JobView>, std::vector<NodeView>>
scheduling_view(const ClusterState& cluster, const std::vector<const Job*>& queue, double now) {
    std::vector<JobView> jobs;
    jobs.reserve(queue.size());
    for (const Job* j : queue)
        jobs.push_back({j->size, j->runtime_estimate, j->priority, now - j->submit_time});
    std::vector<NodeView> nodes;
    nodes.reserve(cluster.nodes().size());
    for (const NodeState& n : cluster.nodes())
        nodes.push_back({n.available ? 1 : 0, n.available ? 0.0 : std::max(0.0, n.est_available_time - now)});
    return {std::move(jobs), std::move(nodes)};
}

struct JobRecord {
    std::int64_t id = 0;
    double submit = 0.0;
    double start = 0.0;
    double end = 0.0;
    int size = 0;
    ExecMode mode = ExecMode::ready;
    bool was_reserved = false;
    double last_reserved_start = 0.0; // meaningful when was_reserved
};

struct InstanceRecord {
    double time = 0.0;
    int queue_len = 0;  // before the policy ran
    int free_nodes = 0; // before the policy ran
    int n_actions = 0;
    double reward = 0.0; // sum over the instance's actions, 0 without a reward fn
};

struct SimulationResult {
    std::vector<JobRecord> jobs; // sorted by id
    std::vector<InstanceRecord> instances;
    double first_submit = 0.0;
    double last_completion = 0.0;
    double total_reward = 0.0;
};

namespace detail {

enum class EventKind : int { completion = 0, arrival = 1 }; // completion first at equal times

struct SimEvent {
    double time;
    EventKind kind;
    std::uint64_t sequence;
    std::int64_t job_id;

    bool operator>(const SimEvent& o) const {
        if (time != o.time)
            return time > o.time;
        if (kind != o.kind)
            return kind > o.kind;
        return sequence > o.sequence;
    }
};

struct RunningJob {
    const Job* job;
    double start;
    std::vector<int> nodes;
};

} // namespace detail

// Trace-driven event simulation: arrivals and completions pop in time order,
// the policy runs once per event batch, and its actions are applied in order.
// Deterministic for identical (jobset, policy, seed, n_nodes).
inline SimulationResult run_simulation(const JobSet& set, SchedulerPolicy& policy, int n_nodes,
                                       std::uint64_t seed, const RewardFn& reward_fn = {}) {
    std::map<std::int64_t, const Job*> by_id;
    for (const Job& j : set.jobs) {
        validate_job(j);
        if (j.size > n_nodes)
            throw std::runtime_error("configuration error: job " + std::to_string(j.id) + " needs " +
                                     std::to_string(j.size) + " nodes but the cluster has " +
                                     std::to_string(n_nodes));
        if (!by_id.emplace(j.id, &j).second)
            throw std::runtime_error("configuration error: duplicate job id " + std::to_string(j.id));
    }

    Rng rng(seed);
    ClusterState cluster(n_nodes);
    std::priority_queue<detail::SimEvent, std::vector<detail::SimEvent>, std::greater<>> events;
    std::uint64_t sequence = 0;

    for (const Job& j : set.jobs)
        events.push({j.submit_time, detail::EventKind::arrival, sequence++, j.id});

    std::vector<const Job*> queue; // waiting, sorted by (submit, id)
    auto enqueue = [&](const Job* j) {
        auto pos = std::lower_bound(queue.begin(), queue.end(), j, [](const Job* a, const Job* b) {
            if (a->submit_time != b->submit_time)
                return a->submit_time < b->submit_time;
            return a->id < b->id;
        });
        queue.insert(pos, j);
    };

    std::map<std::int64_t, detail::RunningJob> running;
    std::set<std::int64_t> completed;
    std::vector<const Job*> gated; // waiting on parents
    std::map<std::int64_t, JobRecord> records;

    auto release_gated = [&]() {
        for (auto it = gated.begin(); it != gated.end();) {
            const Job* j = *it;
            bool ready = true;
            for (std::int64_t dep : j->dependencies) {
                if (by_id.count(dep) && !completed.count(dep)) {
                    ready = false;
                    break;
                }
            }
            if (ready) {
                enqueue(j);
                it = gated.erase(it);
            } else {
                ++it;
            }
        }
    };

    SimulationResult result;
    result.first_submit = set.jobs.empty() ? 0.0 : set.jobs.front().submit_time;

    auto start_job = [&](const Job* j, double now, ExecMode mode) {
        double est_end = now + j->runtime_estimate;
        std::vector<int> nodes = cluster.occupy_lowest_free(j->size, est_end);
        double end = now + j->execution_duration();
        events.push({end, detail::EventKind::completion, sequence++, j->id});
        running[j->id] = {j, now, std::move(nodes)};
        JobRecord& rec = records[j->id];
        rec.start = now;
        rec.end = end;
        rec.mode = mode;
        result.last_completion = std::max(result.last_completion, end);
    };

    while (!events.empty()) {
        double now = events.top().time;
        cluster.set_now(now);

        // completions sort before arrivals, so freed nodes are visible to the
        // same-instant scheduling pass
        while (!events.empty() && events.top().time == now) {
            detail::SimEvent ev = events.top();
            events.pop();
            if (ev.kind == detail::EventKind::completion) {
                auto it = running.find(ev.job_id);
                cluster.release(it->second.nodes);
                running.erase(it);
                completed.insert(ev.job_id);
            } else {
                const Job* j = by_id.at(ev.job_id);
                JobRecord& rec = records[j->id];
                rec.id = j->id;
                rec.submit = j->submit_time;
                rec.size = j->size;
                bool has_pending_parent = false;
                for (std::int64_t dep : j->dependencies)
                    if (by_id.count(dep) && !completed.count(dep))
                        has_pending_parent = true;
                if (has_pending_parent)
                    gated.push_back(j);
                else
                    enqueue(j);
            }
        }
        release_gated();

        InstanceRecord inst;
        inst.time = now;
        inst.queue_len = static_cast<int>(queue.size());
        inst.free_nodes = cluster.free_count();

        ClusterState planning = cluster;
        planning.set_reservation(std::nullopt);
        std::vector<ScheduleAction> actions = policy.decide(queue, std::move(planning), rng);

        std::vector<const Job*> selected;
        for (const ScheduleAction& action : actions) {
            auto qit = std::find_if(queue.begin(), queue.end(),
                                    [&](const Job* j) { return j->id == action.job_id; });
            if (qit == queue.end())
                throw std::runtime_error("contract violation: policy acted on non-queued job " +
                                         std::to_string(action.job_id));
            const Job* j = *qit;

            if (action.mode == ExecMode::reserved) {
                if (action.start_time < now)
                    throw std::runtime_error("contract violation: reservation in the past for job " +
                                             std::to_string(j->id));
                cluster.set_reservation(Reservation{j->id, action.start_time, j->size});
                JobRecord& rec = records[j->id];
                rec.was_reserved = true;
                rec.last_reserved_start = action.start_time;
                selected.push_back(j);
            } else {
                if (j->size > cluster.free_count())
                    throw std::runtime_error("contract violation: job " + std::to_string(j->id) +
                                             " does not fit the free nodes");
                ExecMode mode = action.mode;
                if (cluster.reservation() && cluster.reservation()->job_id == j->id) {
                    if (mode == ExecMode::backfilled)
                        throw std::runtime_error("contract violation: reserved job " + std::to_string(j->id) +
                                                 " backfilled");
                    // the reservation holder starting counts as reserved execution
                    if (now > records[j->id].last_reserved_start + 1e-9)
                        throw std::runtime_error("no-delay violation: job " + std::to_string(j->id) +
                                                 " started after its reserved time");
                    mode = ExecMode::reserved;
                    cluster.set_reservation(std::nullopt);
                }
                start_job(j, now, mode);
                queue.erase(std::find(queue.begin(), queue.end(), j));
                selected.push_back(j);
            }

            if (reward_fn) {
                RewardContext ctx{selected, queue, n_nodes - cluster.free_count(), n_nodes, now};
                inst.reward += reward_fn(ctx);
            }
        }
        inst.n_actions = static_cast<int>(actions.size());
        result.total_reward += inst.reward;
        result.instances.push_back(inst);

        // node conservation is structural; verify at every boundary
        int occupied = 0;
        for (const auto& [id, rj] : running)
            occupied += rj.job->size;
        if (occupied + cluster.free_count() != n_nodes)
            throw std::logic_error("internal error: node conservation violated");

        if (events.empty() && !queue.empty() && running.empty() && actions.empty())
            throw std::runtime_error("contract violation: policy made no progress with " +
                                     std::to_string(queue.size()) + " jobs waiting");
    }

    if (!gated.empty())
        throw std::runtime_error("configuration error: " + std::to_string(gated.size()) +
                                 " jobs gated behind parents that never completed");
    if (!queue.empty())
        throw std::runtime_error("contract violation: simulation drained its events with " +
                                 std::to_string(queue.size()) + " jobs still waiting");

    for (auto& [id, rec] : records)
        result.jobs.push_back(rec);
    return result;
}

} // namespace dras
