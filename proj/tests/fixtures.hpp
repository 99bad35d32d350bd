#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dras/job.hpp"
#include "dras/rng.hpp"

namespace fixtures {

inline dras::Job make_job(std::int64_t id, double submit, double runtime, double estimate, int size,
                          int priority = 0) {
    dras::Job j;
    j.id = id;
    j.submit_time = submit;
    j.actual_runtime = runtime;
    j.runtime_estimate = estimate;
    j.size = size;
    j.priority = priority;
    return j;
}

// Four jobs on a 4-node cluster, all submitted at t=0. Under FCFS-EASY the
// hand-computed schedule is:
//   A starts at 0 (ready), C backfills at 0 and ends at 50, B is reserved for
//   t=100 and starts then, D cannot backfill (200 > 100, no spare nodes at
//   the reserved start) and runs at 200 after being reserved at t=100.
constexpr int kGoldenNodes = 4;

inline dras::JobSet golden_jobset() {
    dras::JobSet set;
    set.label = "golden4";
    set.jobs = {make_job(1, 0, 100, 100, 2), make_job(2, 0, 100, 100, 4), make_job(3, 0, 50, 50, 1),
                make_job(4, 0, 200, 200, 1)};
    return set;
}

// Mixed workload for property tests: sizes from 1 to max_size, estimates at
// or above the actual runtime, Poisson-ish arrivals.
inline dras::JobSet random_jobset(std::uint64_t seed, std::size_t count, int max_size,
                                  double mean_interarrival = 180.0) {
    dras::Rng rng(seed);
    dras::JobSet set;
    set.label = "random_" + std::to_string(seed);
    double t = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        t += rng.exponential(mean_interarrival);
        double runtime = 60.0 + rng.uniform() * 3600.0;
        double ratio = 0.3 + rng.uniform() * 0.7;
        int size = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_size)));
        dras::Job j = make_job(static_cast<std::int64_t>(i + 1), t, runtime, std::ceil(runtime / ratio), size);
        set.jobs.push_back(j);
    }
    set.sort_jobs();
    return set;
}

// Capability-style starvation workload: sustained small-job pressure at just
// under full load, with a few early large jobs. Arrivals stop eventually so
// every policy drains. Greedy no-reservation policies hold the large jobs
// until the pressure ends; reservation-capable ones start them early.
inline dras::JobSet starvation_jobset(std::uint64_t seed, int n_nodes) {
    dras::Rng rng(seed);
    dras::JobSet set;
    set.label = "starvation_" + std::to_string(seed);
    std::int64_t id = 0;
    // early large jobs that need at least three quarters of the machine
    for (int k = 0; k < 6; ++k) {
        double runtime = 3600.0 + rng.uniform() * 3600.0;
        set.jobs.push_back(
            make_job(++id, 600.0 * k, runtime, std::ceil(runtime * 1.2),
                     3 * n_nodes / 4 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n_nodes / 4)))));
    }
    // two days of steady small arrivals at roughly 0.93 of machine capacity
    double mean_work = (1.0 + n_nodes / 8.0) / 2.0 * 1950.0;
    double gap = mean_work / (0.93 * static_cast<double>(n_nodes));
    double t = 0.0;
    while (t < 2.0 * 86400.0) {
        t += rng.exponential(gap);
        double runtime = 300.0 + rng.uniform() * 3300.0;
        int size = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n_nodes / 8)));
        set.jobs.push_back(make_job(++id, t, runtime, std::ceil(runtime * 1.5), size));
    }
    set.sort_jobs();
    return set;
}

} // namespace fixtures
