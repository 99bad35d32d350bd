#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/job.hpp"
#include "dras/rng.hpp"

namespace dras {

// Empirical distribution over observed values: (value, fraction) sorted by
// value, fractions summing to 1.
struct Histogram {
    std::vector<std::pair<double, double>> bins;

    double sample(Rng& rng) const {
        double u = rng.uniform();
        double acc = 0.0;
        for (const auto& [value, frac] : bins) {
            acc += frac;
            if (u < acc)
                return value;
        }
        return bins.back().first;
    }
};

struct WorkloadStats {
    double mean_interarrival = 0.0;
    std::array<double, 7> weekly_arrival_histogram{};  // fraction per weekday
    std::array<double, 24> hourly_arrival_histogram{}; // fraction per hour of day
    Histogram size_histogram;
    Histogram runtime_histogram;
    Histogram estimate_ratio_histogram; // actual/estimate, clamped to (0, 1]
};

constexpr double kSecondsPerHour = 3600.0;
constexpr double kSecondsPerDay = 86400.0;
constexpr double kSecondsPerWeek = 7.0 * kSecondsPerDay;

// Keeps jobs with size >= min_size. With drop_dependent set, dependent jobs
// are retained and their dependency list survives so the simulator hides them
// until all parents finished; otherwise dependencies are stripped and every
// job is treated as independent.
inline JobSet filter_jobs(const JobSet& set, int min_size, bool drop_dependent) {
    if (min_size < 0)
        throw std::invalid_argument("filter_jobs: min_size < 0");
    JobSet out;
    out.source = set.source;
    out.label = set.label;
    for (const Job& j : set.jobs) {
        if (j.size < min_size)
            continue;
        Job copy = j;
        if (!drop_dependent)
            copy.dependencies.clear();
        out.jobs.push_back(std::move(copy));
    }
    out.sort_jobs();
    return out;
}

// Partitions by submit_time into the half-open intervals induced by the
// boundaries; within each part submit times are re-based so the part's first
// job arrives at 0.
inline std::vector<JobSet> split_jobset(const JobSet& set, const std::vector<double>& boundaries) {
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (boundaries[i] <= boundaries[i - 1])
            throw std::invalid_argument("split_jobset: boundaries must be strictly increasing");

    std::vector<JobSet> parts(boundaries.size() + 1);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        parts[p].source = set.source;
        parts[p].label = set.label + "/part" + std::to_string(p);
    }
    for (const Job& j : set.jobs) {
        // intervals are [b_{k-1}, b_k): part index = number of boundaries <= submit
        std::size_t p = std::upper_bound(boundaries.begin(), boundaries.end(), j.submit_time) - boundaries.begin();
        parts[p].jobs.push_back(j);
    }
    for (JobSet& part : parts) {
        part.sort_jobs();
        if (!part.jobs.empty()) {
            double base = part.jobs.front().submit_time;
            for (Job& j : part.jobs)
                j.submit_time -= base;
        }
    }
    return parts;
}

namespace detail {

inline Histogram empirical_histogram(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    Histogram h;
    double weight = 1.0 / static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i])
            ++j;
        h.bins.emplace_back(values[i], weight * static_cast<double>(j - i));
        i = j;
    }
    return h;
}

} // namespace detail

inline WorkloadStats compute_stats(const JobSet& set) {
    if (set.jobs.empty())
        throw std::invalid_argument("compute_stats: empty jobset");

    WorkloadStats stats;
    const auto& jobs = set.jobs;
    if (jobs.size() > 1)
        stats.mean_interarrival =
            (jobs.back().submit_time - jobs.front().submit_time) / static_cast<double>(jobs.size() - 1);

    double frac = 1.0 / static_cast<double>(jobs.size());
    std::vector<double> sizes, runtimes, ratios;
    sizes.reserve(jobs.size());
    runtimes.reserve(jobs.size());
    ratios.reserve(jobs.size());
    for (const Job& j : jobs) {
        int day = static_cast<int>(std::fmod(std::floor(j.submit_time / kSecondsPerDay), 7.0));
        int hour = static_cast<int>(std::fmod(std::floor(j.submit_time / kSecondsPerHour), 24.0));
        stats.weekly_arrival_histogram[day] += frac;
        stats.hourly_arrival_histogram[hour] += frac;
        sizes.push_back(static_cast<double>(j.size));
        runtimes.push_back(j.actual_runtime);
        // kill semantics make the observed runtime <= estimate; clamp stragglers
        ratios.push_back(std::min(1.0, j.actual_runtime / j.runtime_estimate));
    }
    stats.size_histogram = detail::empirical_histogram(std::move(sizes));
    stats.runtime_histogram = detail::empirical_histogram(std::move(runtimes));
    stats.estimate_ratio_histogram = detail::empirical_histogram(std::move(ratios));
    return stats;
}

// Uniform resampling with replacement; arrivals become a Poisson process with
// the source's mean inter-arrival time.
inline JobSet sample_jobset(const JobSet& source, std::size_t count, std::uint64_t seed,
                            const std::string& label = "sampled") {
    if (count < 1)
        throw std::invalid_argument("sample_jobset: count < 1");
    if (source.jobs.empty())
        throw std::invalid_argument("sample_jobset: empty source");

    double mean_ia = compute_stats(source).mean_interarrival;
    Rng rng(seed);
    JobSet out;
    out.source = JobSource::sampled;
    out.label = label;
    double t = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        t += rng.exponential(mean_ia);
        Job j = source.jobs[rng.uniform_index(source.jobs.size())];
        j.id = static_cast<std::int64_t>(i + 1);
        j.submit_time = t;
        j.dependencies.clear();
        out.jobs.push_back(std::move(j));
    }
    out.sort_jobs();
    return out;
}

// Non-homogeneous Poisson arrivals via thinning of the weekday x hour rate
// product, scaled to the source mean inter-arrival; sizes and runtimes drawn
// from their empirical histograms, estimates derived from the ratio histogram.
inline JobSet synthesize_jobset(const WorkloadStats& stats, std::size_t count, std::uint64_t seed,
                                const std::string& label = "synthetic") {
    if (count < 1)
        throw std::invalid_argument("synthesize_jobset: count < 1");

    Rng rng(seed);
    JobSet out;
    out.source = JobSource::synthetic;
    out.label = label;

    double mean_ia = std::max(stats.mean_interarrival, 1e-9);
    // lambda(t) = c * weekly[day] * hourly[hour]; averaging over a full week
    // gives c/(7*24), so c = 7*24/mean_ia matches the target overall rate.
    double c = 7.0 * 24.0 / mean_ia;
    double wmax = *std::max_element(stats.weekly_arrival_histogram.begin(), stats.weekly_arrival_histogram.end());
    double hmax = *std::max_element(stats.hourly_arrival_histogram.begin(), stats.hourly_arrival_histogram.end());
    double lambda_max = c * wmax * hmax;

    double t = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        for (;;) {
            t += rng.exponential(1.0 / lambda_max);
            int day = static_cast<int>(std::fmod(std::floor(t / kSecondsPerDay), 7.0));
            int hour = static_cast<int>(std::fmod(std::floor(t / kSecondsPerHour), 24.0));
            double lambda = c * stats.weekly_arrival_histogram[day] * stats.hourly_arrival_histogram[hour];
            if (rng.uniform() * lambda_max < lambda)
                break;
        }
        Job j;
        j.id = static_cast<std::int64_t>(i + 1);
        j.submit_time = t;
        j.size = static_cast<int>(stats.size_histogram.sample(rng));
        j.actual_runtime = stats.runtime_histogram.sample(rng);
        double ratio = stats.estimate_ratio_histogram.sample(rng);
        j.runtime_estimate = std::ceil(j.actual_runtime / ratio);
        out.jobs.push_back(std::move(j));
    }
    out.sort_jobs();
    return out;
}

} // namespace dras
