#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

#include "dras/simulator.hpp"

namespace dras {

// capability balances starvation avoidance, large-job promotion and
// utilization; capacity is the printed queue-wait form; capacity_linear is a
// clearly-labeled alternative that penalizes mean wait directly.
enum class RewardKind { capability, capacity, capacity_linear };

inline RewardKind reward_kind_from_string(const std::string& s) {
    if (s == "capability")
        return RewardKind::capability;
    if (s == "capacity")
        return RewardKind::capacity;
    if (s == "capacity-linear" || s == "capacity_linear")
        return RewardKind::capacity_linear;
    throw std::invalid_argument("unknown reward kind: " + s);
}

struct RewardWeights {
    double w1 = 1.0 / 3.0;
    double w2 = 1.0 / 3.0;
    double w3 = 1.0 / 3.0;
};

inline double compute_reward(RewardKind kind, const RewardWeights& w, const RewardContext& ctx,
                             double time_scale = 86400.0) {
    switch (kind) {
    case RewardKind::capability: {
        if (ctx.selected.empty())
            return 0.0;
        double mean_wait = 0.0, mean_size = 0.0, max_wait = 0.0;
        for (const Job* j : ctx.selected) {
            double wait = ctx.now - j->submit_time;
            mean_wait += wait;
            mean_size += j->size;
            max_wait = std::max(max_wait, wait);
        }
        mean_wait /= static_cast<double>(ctx.selected.size());
        mean_size /= static_cast<double>(ctx.selected.size());
        for (const Job* j : ctx.queue)
            max_wait = std::max(max_wait, ctx.now - j->submit_time);
        double n = static_cast<double>(ctx.total_nodes);
        return w.w1 * (mean_wait / std::max(1.0, max_wait)) + w.w2 * (mean_size / n) +
               w.w3 * (static_cast<double>(ctx.nodes_used) / n);
    }
    case RewardKind::capacity: {
        double sum = 0.0;
        for (const Job* j : ctx.queue)
            sum += -1.0 / std::max(ctx.now - j->submit_time, 1.0);
        return sum / std::max<std::size_t>(1, ctx.queue.size());
    }
    case RewardKind::capacity_linear: {
        if (ctx.queue.empty())
            return 0.0;
        double sum = 0.0;
        for (const Job* j : ctx.queue)
            sum += ctx.now - j->submit_time;
        return -(sum / static_cast<double>(ctx.queue.size())) / time_scale;
    }
    }
    return 0.0;
}

inline RewardFn make_reward_fn(RewardKind kind, RewardWeights weights, double time_scale) {
    return [=](const RewardContext& ctx) { return compute_reward(kind, weights, ctx, time_scale); };
}

} // namespace dras
