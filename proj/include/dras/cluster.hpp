#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dras/job.hpp"

namespace dras {

// Scheduler-facing node state. For an occupied node est_available_time is
// start + runtime_estimate of the job on it (the scheduler plans with user
// estimates; the actual completion may come earlier).
struct NodeState {
    bool available = true;
    double est_available_time = 0.0; // absolute seconds; <= now when available
};

struct Reservation {
    std::int64_t job_id = 0;
    double start_time = 0.0;
    int size = 0;
};

struct ReservationPlan {
    double start_time = 0.0;
    std::vector<int> nodes; // claimed nodes, lowest est-available first
};

// The cluster as a policy sees and plans with it. Policies receive a copy per
// scheduling instance and apply their own planned starts to it while building
// an action list; the simulator applies the returned actions authoritatively.
class ClusterState {
public:
    ClusterState() = default;
    explicit ClusterState(int total_nodes, double now = 0.0)
        : now_(now), nodes_(static_cast<std::size_t>(total_nodes)) {
        for (auto& n : nodes_)
            n.est_available_time = now;
    }

    int total_nodes() const { return static_cast<int>(nodes_.size()); }
    double now() const { return now_; }
    void set_now(double t) { now_ = t; }

    const std::vector<NodeState>& nodes() const { return nodes_; }

    int free_count() const {
        return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                              [](const NodeState& n) { return n.available; }));
    }

    // Nodes free at time t going by estimates.
    int free_at(double t) const {
        return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [&](const NodeState& n) {
            return n.available || n.est_available_time <= t;
        }));
    }

    const std::optional<Reservation>& reservation() const { return reservation_; }
    void set_reservation(std::optional<Reservation> r) { reservation_ = std::move(r); }

    // Occupies the `size` lowest-numbered free nodes until est_end.
    std::vector<int> occupy_lowest_free(int size, double est_end) {
        std::vector<int> chosen;
        chosen.reserve(static_cast<std::size_t>(size));
        for (std::size_t i = 0; i < nodes_.size() && static_cast<int>(chosen.size()) < size; ++i) {
            if (nodes_[i].available)
                chosen.push_back(static_cast<int>(i));
        }
        if (static_cast<int>(chosen.size()) < size)
            throw std::runtime_error("contract violation: not enough free nodes to start job");
        for (int i : chosen) {
            nodes_[static_cast<std::size_t>(i)].available = false;
            nodes_[static_cast<std::size_t>(i)].est_available_time = est_end;
        }
        return chosen;
    }

    void release(const std::vector<int>& node_ids) {
        for (int i : node_ids) {
            nodes_[static_cast<std::size_t>(i)].available = true;
            nodes_[static_cast<std::size_t>(i)].est_available_time = now_;
        }
    }

private:
    double now_ = 0.0;
    std::vector<NodeState> nodes_;
    std::optional<Reservation> reservation_;
};

// Earliest time T >= now at which `job.size` nodes are free going by the
// running jobs' estimated ends, together with the claimed nodes (lowest
// est-available first, ties by node id). Pre: the job does not fit now.
inline ReservationPlan earliest_reservation_time(const ClusterState& cluster, const Job& job) {
    if (job.size > cluster.total_nodes())
        throw std::invalid_argument("job " + std::to_string(job.id) + " larger than the cluster");

    std::vector<std::pair<double, int>> avail; // (est available, node id)
    avail.reserve(cluster.nodes().size());
    for (std::size_t i = 0; i < cluster.nodes().size(); ++i) {
        const NodeState& n = cluster.nodes()[i];
        avail.emplace_back(n.available ? cluster.now() : n.est_available_time, static_cast<int>(i));
    }
    std::sort(avail.begin(), avail.end());

    ReservationPlan plan;
    plan.nodes.reserve(static_cast<std::size_t>(job.size));
    for (int k = 0; k < job.size; ++k)
        plan.nodes.push_back(avail[static_cast<std::size_t>(k)].second);
    plan.start_time = std::max(cluster.now(), avail[static_cast<std::size_t>(job.size - 1)].first);
    return plan;
}

// EASY backfill filter: queued jobs (excluding the reserved one) that fit the
// currently free nodes and either finish by the reserved start or fit into
// the nodes left over at the reserved start. Queue order is preserved.
// The estimate-vs-reserved-start boundary is inclusive.
template <typename JobPtrRange>
std::vector<const Job*> backfill_candidates(const ClusterState& cluster, const JobPtrRange& queue, double now) {
    if (!cluster.reservation())
        throw std::runtime_error("contract violation: backfill_candidates requires an active reservation");
    const Reservation& res = *cluster.reservation();
    int free_now = cluster.free_count();
    int spare_at_reservation = cluster.free_at(res.start_time) - res.size;
    int hole = std::min(free_now, spare_at_reservation);

    std::vector<const Job*> out;
    for (const Job* j : queue) {
        if (j->id == res.job_id)
            continue;
        if (j->size > free_now)
            continue;
        if (now + j->runtime_estimate <= res.start_time || j->size <= hole)
            out.push_back(j);
    }
    return out;
}

} // namespace dras
