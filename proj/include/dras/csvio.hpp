#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/metrics.hpp"
#include "dras/simulator.hpp"
#include "dras/trainer.hpp"
#include "dras/workload.hpp"

namespace dras {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    return out;
}

inline void write_result_csv(std::ostream& out, const SimulationResult& result) {
    out << "job_id,submit,start,end,size,mode\n";
    for (const JobRecord& j : result.jobs)
        out << j.id << ',' << csv_num(j.submit) << ',' << csv_num(j.start) << ',' << csv_num(j.end) << ','
            << j.size << ',' << to_string(j.mode) << '\n';
}

inline void write_instances_csv(std::ostream& out, const SimulationResult& result) {
    out << "time,queue_len,free_nodes,n_actions,reward\n";
    for (const InstanceRecord& r : result.instances)
        out << csv_num(r.time) << ',' << r.queue_len << ',' << r.free_nodes << ',' << r.n_actions << ','
            << csv_num(r.reward) << '\n';
}

inline void write_summary_csv(std::ostream& out,
                              const std::vector<std::pair<std::string, MetricsSummary>>& summaries) {
    out << "policy,avg_wait,max_wait,avg_response,avg_slowdown_bounded_10s,avg_slowdown_literal,utilization\n";
    for (const auto& [name, m] : summaries)
        out << name << ',' << csv_num(m.avg_wait) << ',' << csv_num(m.max_wait) << ',' << csv_num(m.avg_response)
            << ',' << csv_num(m.avg_slowdown) << ',' << csv_num(m.avg_slowdown_literal) << ','
            << csv_num(m.utilization) << '\n';
}

inline void write_modes_csv(std::ostream& out,
                            const std::vector<std::pair<std::string, MetricsSummary>>& summaries) {
    out << "policy,mode,job_fraction,core_hour_fraction\n";
    for (const auto& [name, m] : summaries)
        for (const auto& [mode, share] : m.mode_shares)
            out << name << ',' << to_string(mode) << ',' << csv_num(share.job_fraction) << ','
                << csv_num(share.core_hour_fraction) << '\n';
}

inline void write_waits_csv(std::ostream& out,
                            const std::vector<std::pair<std::string, const SimulationResult*>>& results) {
    out << "policy,job_id,size,mode,wait\n";
    for (const auto& [name, result] : results)
        for (const JobRecord& j : result->jobs)
            out << name << ',' << j.id << ',' << j.size << ',' << to_string(j.mode) << ','
                << csv_num(j.start - j.submit) << '\n';
}

inline void
write_kiviat_csv(std::ostream& out,
                 const std::vector<std::pair<std::string, std::array<double, 5>>>& normalized) {
    out << "policy,recip_avg_wait,recip_max_wait,recip_avg_slowdown,recip_avg_response,utilization\n";
    for (const auto& [name, axes] : normalized) {
        out << name;
        for (double v : axes)
            out << ',' << csv_num(v);
        out << '\n';
    }
}

inline void write_stats_csv(std::ostream& out, const WorkloadStats& stats) {
    out << "histogram,bin,value\n";
    out << "mean_interarrival,0," << csv_num(stats.mean_interarrival) << '\n';
    for (std::size_t d = 0; d < stats.weekly_arrival_histogram.size(); ++d)
        out << "weekly_arrivals," << d << ',' << csv_num(stats.weekly_arrival_histogram[d]) << '\n';
    for (std::size_t h = 0; h < stats.hourly_arrival_histogram.size(); ++h)
        out << "hourly_arrivals," << h << ',' << csv_num(stats.hourly_arrival_histogram[h]) << '\n';
    for (const auto& [value, frac] : stats.size_histogram.bins)
        out << "job_size," << csv_num(value) << ',' << csv_num(frac) << '\n';
    for (const auto& [value, frac] : stats.runtime_histogram.bins)
        out << "job_runtime," << csv_num(value) << ',' << csv_num(frac) << '\n';
    for (const auto& [value, frac] : stats.estimate_ratio_histogram.bins)
        out << "estimate_ratio," << csv_num(value) << ',' << csv_num(frac) << '\n';
}

// the snapshot column carries the file name only: snapshots sit next to the
// report, and absolute paths would break byte-identical reruns into
// different output directories
inline void write_training_report_csv(std::ostream& out, const TrainingReport& report) {
    out << "episode,phase,total_reward,epsilon,snapshot_path\n";
    for (const EpisodeReport& e : report.episodes)
        out << e.episode << ',' << to_string(e.phase) << ',' << csv_num(e.total_reward) << ','
            << csv_num(e.epsilon) << ',' << std::filesystem::path(e.snapshot_path).filename().string() << '\n';
}

} // namespace dras
