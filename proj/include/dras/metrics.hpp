#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/simulator.hpp"

namespace dras {

struct ModeShare {
    double job_fraction = 0.0;
    double core_hour_fraction = 0.0; // node-seconds share, really
};

struct MetricsSummary {
    double avg_wait = 0.0;
    double max_wait = 0.0;
    double avg_response = 0.0;
    double avg_slowdown = 0.0;         // bounded: response / max(runtime, 10 s), floored at 1
    double avg_slowdown_literal = 0.0; // plain response / runtime
    double utilization = 0.0;
    std::map<ExecMode, ModeShare> mode_shares;
};

constexpr double kSlowdownRuntimeBound = 10.0; // seconds

inline MetricsSummary compute_metrics(const SimulationResult& result, int n_nodes) {
    if (result.jobs.empty())
        throw std::invalid_argument("compute_metrics: empty simulation result");

    MetricsSummary m;
    double node_seconds = 0.0;
    std::map<ExecMode, double> mode_jobs, mode_node_seconds;
    for (const JobRecord& j : result.jobs) {
        double wait = j.start - j.submit;
        double response = j.end - j.submit;
        double duration = j.end - j.start;
        m.avg_wait += wait;
        m.max_wait = std::max(m.max_wait, wait);
        m.avg_response += response;
        m.avg_slowdown += std::max(1.0, response / std::max(duration, kSlowdownRuntimeBound));
        m.avg_slowdown_literal += response / duration;
        double ns = static_cast<double>(j.size) * duration;
        node_seconds += ns;
        mode_jobs[j.mode] += 1.0;
        mode_node_seconds[j.mode] += ns;
    }
    double count = static_cast<double>(result.jobs.size());
    m.avg_wait /= count;
    m.avg_response /= count;
    m.avg_slowdown /= count;
    m.avg_slowdown_literal /= count;

    double elapsed = result.last_completion - result.first_submit;
    m.utilization = node_seconds / (static_cast<double>(n_nodes) * elapsed);

    for (ExecMode mode : {ExecMode::ready, ExecMode::reserved, ExecMode::backfilled}) {
        ModeShare share;
        share.job_fraction = mode_jobs[mode] / count;
        share.core_hour_fraction = node_seconds > 0.0 ? mode_node_seconds[mode] / node_seconds : 0.0;
        m.mode_shares[mode] = share;
    }
    return m;
}

struct WaitGroup {
    std::size_t bucket = 0; // index into the size intervals induced by the boundaries
    ExecMode mode = ExecMode::ready;
    std::vector<double> waits;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

// Groups job waits by (size bucket, execution mode); empty groups are omitted.
// Bucket k covers sizes in [boundary_{k-1}, boundary_k).
inline std::vector<WaitGroup> wait_distribution(const SimulationResult& result,
                                                const std::vector<int>& size_boundaries) {
    for (std::size_t i = 1; i < size_boundaries.size(); ++i)
        if (size_boundaries[i] <= size_boundaries[i - 1])
            throw std::invalid_argument("wait_distribution: boundaries must be increasing");

    std::map<std::pair<std::size_t, int>, WaitGroup> groups;
    for (const JobRecord& j : result.jobs) {
        std::size_t bucket = 0;
        while (bucket < size_boundaries.size() && j.size >= size_boundaries[bucket])
            ++bucket;
        auto key = std::make_pair(bucket, static_cast<int>(j.mode));
        WaitGroup& g = groups[key];
        g.bucket = bucket;
        g.mode = j.mode;
        g.waits.push_back(j.start - j.submit);
    }

    std::vector<WaitGroup> out;
    for (auto& [key, g] : groups) {
        std::sort(g.waits.begin(), g.waits.end());
        g.min = g.waits.front();
        g.max = g.waits.back();
        std::size_t n = g.waits.size();
        g.median = n % 2 == 1 ? g.waits[n / 2] : 0.5 * (g.waits[n / 2 - 1] + g.waits[n / 2]);
        out.push_back(std::move(g));
    }
    return out;
}

// Kiviat axes: reciprocal avg wait, reciprocal max wait, reciprocal avg
// slowdown, reciprocal avg response, utilization. Min-max normalized across
// policies so the best value maps to 1 and the worst to 0; an axis on which
// all policies agree maps to 1 everywhere.
inline std::vector<std::pair<std::string, std::array<double, 5>>>
kiviat_normalize(const std::vector<std::pair<std::string, MetricsSummary>>& summaries) {
    if (summaries.size() < 2)
        throw std::invalid_argument("kiviat_normalize: need at least two policies");

    auto recip = [](double x) { return 1.0 / std::max(x, 1e-9); };
    std::vector<std::array<double, 5>> raw;
    raw.reserve(summaries.size());
    for (const auto& [name, s] : summaries)
        raw.push_back({recip(s.avg_wait), recip(s.max_wait), recip(s.avg_slowdown), recip(s.avg_response),
                       s.utilization});

    std::vector<std::pair<std::string, std::array<double, 5>>> out;
    out.reserve(summaries.size());
    for (std::size_t p = 0; p < summaries.size(); ++p)
        out.emplace_back(summaries[p].first, std::array<double, 5>{});

    for (std::size_t axis = 0; axis < 5; ++axis) {
        double lo = raw[0][axis], hi = raw[0][axis];
        for (const auto& r : raw) {
            lo = std::min(lo, r[axis]);
            hi = std::max(hi, r[axis]);
        }
        for (std::size_t p = 0; p < raw.size(); ++p)
            out[p].second[axis] = hi > lo ? (raw[p][axis] - lo) / (hi - lo) : 1.0;
    }
    return out;
}

} // namespace dras
