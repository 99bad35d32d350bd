#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/cluster.hpp"
#include "dras/reward.hpp"
#include "dras/simulator.hpp"

namespace dras {

// FCFS with EASY backfilling: start head jobs while they fit, reserve the
// first one that does not, then backfill the rest of the queue first-fit.
inline std::vector<ScheduleAction> fcfs_easy_decide(const std::vector<const Job*>& queue,
                                                    ClusterState& cluster) {
    std::vector<ScheduleAction> actions;
    std::vector<const Job*> waiting(queue);
    double now = cluster.now();

    while (!waiting.empty() && waiting.front()->size <= cluster.free_count()) {
        const Job* j = waiting.front();
        cluster.occupy_lowest_free(j->size, now + j->runtime_estimate);
        actions.push_back({j->id, ExecMode::ready, now});
        waiting.erase(waiting.begin());
    }
    if (waiting.empty())
        return actions;

    const Job* blocked = waiting.front();
    ReservationPlan plan = earliest_reservation_time(cluster, *blocked);
    cluster.set_reservation(Reservation{blocked->id, plan.start_time, blocked->size});
    actions.push_back({blocked->id, ExecMode::reserved, plan.start_time});

    for (;;) {
        std::vector<const Job*> candidates = backfill_candidates(cluster, waiting, now);
        if (candidates.empty())
            break;
        const Job* j = candidates.front();
        cluster.occupy_lowest_free(j->size, now + j->runtime_estimate);
        actions.push_back({j->id, ExecMode::backfilled, now});
        waiting.erase(std::find(waiting.begin(), waiting.end(), j));
    }
    return actions;
}

// Largest runnable job first (ties: earliest submit, then id). No reservation,
// no backfilling.
inline std::vector<ScheduleAction> binpacking_decide(const std::vector<const Job*>& queue,
                                                     ClusterState& cluster) {
    std::vector<ScheduleAction> actions;
    std::vector<const Job*> waiting(queue);
    double now = cluster.now();
    for (;;) {
        int free = cluster.free_count();
        const Job* best = nullptr;
        for (const Job* j : waiting) {
            if (j->size > free)
                continue;
            if (!best || j->size > best->size ||
                (j->size == best->size &&
                 (j->submit_time < best->submit_time ||
                  (j->submit_time == best->submit_time && j->id < best->id))))
                best = j;
        }
        if (!best)
            return actions;
        cluster.occupy_lowest_free(best->size, now + best->runtime_estimate);
        actions.push_back({best->id, ExecMode::ready, now});
        waiting.erase(std::find(waiting.begin(), waiting.end(), best));
    }
}

// Uniformly random among runnable jobs until nothing fits.
inline std::vector<ScheduleAction> random_decide(const std::vector<const Job*>& queue, ClusterState& cluster,
                                                 Rng& rng) {
    std::vector<ScheduleAction> actions;
    std::vector<const Job*> waiting(queue);
    double now = cluster.now();
    for (;;) {
        std::vector<const Job*> runnable;
        int free = cluster.free_count();
        for (const Job* j : waiting)
            if (j->size <= free)
                runnable.push_back(j);
        if (runnable.empty())
            return actions;
        const Job* j = runnable[rng.uniform_index(runnable.size())];
        cluster.occupy_lowest_free(j->size, now + j->runtime_estimate);
        actions.push_back({j->id, ExecMode::ready, now});
        waiting.erase(std::find(waiting.begin(), waiting.end(), j));
    }
}

struct KnapsackItem {
    std::int64_t id = 0;
    int weight = 1; // node count, >= 1
    double value = 0.0;
};

struct KnapsackSolution {
    std::vector<std::int64_t> chosen; // ascending ids
    double total_value = 0.0;
};

// Exact 0-1 knapsack by dynamic programming over capacity. Ties are broken
// toward the lexicographically smallest chosen-id set: walk items in id order
// and include whenever inclusion stays optimal, unless exclusion is optimal
// with nothing left to gain.
inline KnapsackSolution knapsack_dp(int capacity, std::vector<KnapsackItem> items) {
    if (capacity < 0)
        throw std::invalid_argument("knapsack_dp: negative capacity");
    for (const KnapsackItem& it : items)
        if (it.weight < 1)
            throw std::invalid_argument("knapsack_dp: item weight < 1");
    std::sort(items.begin(), items.end(), [](const KnapsackItem& a, const KnapsackItem& b) { return a.id < b.id; });

    std::size_t n = items.size();
    std::size_t cap = static_cast<std::size_t>(capacity);
    // best[i][c]: max value using items i.. with capacity c
    std::vector<std::vector<double>> best(n + 1, std::vector<double>(cap + 1, 0.0));
    for (std::size_t i = n; i-- > 0;) {
        std::size_t w = static_cast<std::size_t>(items[i].weight);
        for (std::size_t c = 0; c <= cap; ++c) {
            double exclude = best[i + 1][c];
            double include = w <= c ? items[i].value + best[i + 1][c - w] : -1.0;
            best[i][c] = std::max(exclude, include);
        }
    }

    KnapsackSolution sol;
    sol.total_value = best[0][cap];
    std::size_t c = cap;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = static_cast<std::size_t>(items[i].weight);
        bool can_include = w <= c && items[i].value + best[i + 1][c - w] == best[i][c];
        bool can_exclude = best[i + 1][c] == best[i][c];
        if (can_include && (!can_exclude || best[i + 1][c] > 0.0)) {
            sol.chosen.push_back(items[i].id);
            c -= w;
        }
    }
    return sol;
}

// Per-job value surrogate for the knapsack objective. The exact objectives
// are not additive per job; this linearization keeps each term's direction
// of preference while making them separable.
inline double knapsack_job_value(RewardKind kind, const RewardWeights& w, const Job& job, double now,
                                 double max_queue_wait, int total_nodes) {
    double wait = now - job.submit_time;
    switch (kind) {
    case RewardKind::capability: {
        double wait_ratio = max_queue_wait > 0.0 ? wait / max_queue_wait : 1.0;
        return w.w1 * wait_ratio + (w.w2 + w.w3) * (static_cast<double>(job.size) / total_nodes);
    }
    case RewardKind::capacity:
    case RewardKind::capacity_linear:
        return 1.0 / std::max(wait, 1.0);
    }
    return 0.0;
}

// Selects the queued job set maximizing the surrogate value under the
// free-node capacity, all started immediately. Never reserves or backfills.
inline std::vector<ScheduleAction> optimization_decide(const std::vector<const Job*>& queue,
                                                       ClusterState& cluster, RewardKind kind,
                                                       const RewardWeights& weights) {
    std::vector<ScheduleAction> actions;
    if (queue.empty())
        return actions;
    double now = cluster.now();
    double max_wait = 0.0;
    for (const Job* j : queue)
        max_wait = std::max(max_wait, now - j->submit_time);

    std::vector<KnapsackItem> items;
    items.reserve(queue.size());
    for (const Job* j : queue)
        items.push_back({j->id, j->size, knapsack_job_value(kind, weights, *j, now, max_wait, cluster.total_nodes())});

    KnapsackSolution sol = knapsack_dp(cluster.free_count(), std::move(items));
    for (const Job* j : queue) {
        if (std::find(sol.chosen.begin(), sol.chosen.end(), j->id) == sol.chosen.end())
            continue;
        cluster.occupy_lowest_free(j->size, now + j->runtime_estimate);
        actions.push_back({j->id, ExecMode::ready, now});
    }
    return actions;
}

// --- SchedulerPolicy wrappers ----------------------------------------------

class FcfsEasyPolicy final : public SchedulerPolicy {
public:
    std::vector<ScheduleAction> decide(const std::vector<const Job*>& queue, ClusterState cluster,
                                       Rng&) override {
        return fcfs_easy_decide(queue, cluster);
    }
};

class BinPackingPolicy final : public SchedulerPolicy {
public:
    std::vector<ScheduleAction> decide(const std::vector<const Job*>& queue, ClusterState cluster,
                                       Rng&) override {
        return binpacking_decide(queue, cluster);
    }
};

class RandomPolicy final : public SchedulerPolicy {
public:
    std::vector<ScheduleAction> decide(const std::vector<const Job*>& queue, ClusterState cluster,
                                       Rng& rng) override {
        return random_decide(queue, cluster, rng);
    }
};

class OptimizationPolicy final : public SchedulerPolicy {
public:
    OptimizationPolicy(RewardKind kind, RewardWeights weights) : kind_(kind), weights_(weights) {}

    std::vector<ScheduleAction> decide(const std::vector<const Job*>& queue, ClusterState cluster,
                                       Rng&) override {
        return optimization_decide(queue, cluster, kind_, weights_);
    }

private:
    RewardKind kind_;
    RewardWeights weights_;
};

} // namespace dras
