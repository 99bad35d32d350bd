#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dras {

// One submitted job. Times are in seconds since the trace epoch.
// runtime_estimate is the user-supplied walltime: it is a hard kill bound,
// so the simulated execution duration is min(actual_runtime, runtime_estimate).
struct Job {
    std::int64_t id = 0;
    double submit_time = 0.0;
    double actual_runtime = 0.0;
    double runtime_estimate = 0.0;
    int size = 1;               // node count
    int priority = 0;           // 1 high, 0 low
    std::vector<std::int64_t> dependencies; // parent job ids, all submitted earlier

    // What the job actually runs for before completing or being killed.
    double execution_duration() const {
        return std::min(actual_runtime, runtime_estimate);
    }
};

enum class JobSource { real, sampled, synthetic };

inline const char* to_string(JobSource s) {
    switch (s) {
    case JobSource::real: return "real";
    case JobSource::sampled: return "sampled";
    case JobSource::synthetic: return "synthetic";
    }
    return "?";
}

// A trace segment. Jobs are kept sorted by (submit_time, id).
struct JobSet {
    std::vector<Job> jobs;
    JobSource source = JobSource::real;
    std::string label;

    void sort_jobs() {
        std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
            if (a.submit_time != b.submit_time)
                return a.submit_time < b.submit_time;
            return a.id < b.id;
        });
    }

    bool empty() const { return jobs.empty(); }
    std::size_t size() const { return jobs.size(); }
};

inline void validate_job(const Job& j) {
    if (j.size < 1)
        throw std::invalid_argument("job " + std::to_string(j.id) + ": size < 1");
    if (j.actual_runtime <= 0.0)
        throw std::invalid_argument("job " + std::to_string(j.id) + ": actual_runtime <= 0");
    if (j.runtime_estimate <= 0.0)
        throw std::invalid_argument("job " + std::to_string(j.id) + ": runtime_estimate <= 0");
}

} // namespace dras
