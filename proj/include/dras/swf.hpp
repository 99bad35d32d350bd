#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/job.hpp"

namespace dras {

// Standard Workload Format I/O. Comment/header lines start with ';', data
// lines carry >= 18 whitespace-separated numeric fields:
//   1 id, 2 submit, 3 wait, 4 runtime, 5 allocated procs, 6 cpu, 7 mem,
//   8 requested procs, 9 requested time, 10 requested mem, 11 status,
//   12 uid, 13 gid, 14 app, 15 queue, 16 partition, 17 hp-queue marker,
//   18 think time.
// Field 17 doubles as the high-priority marker: a job is high priority iff
// field 17 equals the configured high-priority queue id.

struct SwfParseResult {
    JobSet jobset;
    std::size_t skipped_lines = 0; // data lines dropped for size/runtime <= 0
};

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
    const char* s = tok.c_str();
    char* end = nullptr;
    out = std::strtod(s, &end);
    return end != s && *end == '\0' && std::isfinite(out);
}

} // namespace detail

inline SwfParseResult parse_swf(std::istream& in, long long high_priority_queue_id = -1,
                                const std::string& label = "") {
    SwfParseResult result;
    result.jobset.source = JobSource::real;
    result.jobset.label = label;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos)
            continue;
        if (line[start] == ';')
            continue;

        std::istringstream fields(line);
        std::vector<double> f;
        std::string tok;
        while (fields >> tok) {
            double v;
            if (!detail::parse_double(tok, v))
                throw std::runtime_error("parse error: line " + std::to_string(line_no) +
                                         ": malformed numeric field '" + tok + "'");
            f.push_back(v);
        }
        if (f.size() < 18)
            throw std::runtime_error("parse error: line " + std::to_string(line_no) + ": expected >= 18 fields, got " +
                                     std::to_string(f.size()));

        Job j;
        j.id = static_cast<std::int64_t>(f[0]);
        j.submit_time = f[1];
        j.actual_runtime = f[3];
        j.size = static_cast<int>(f[7] > 0 ? f[7] : f[4]);
        j.runtime_estimate = f[8] > 0 ? f[8] : f[3];
        // a negative configured id disables the priority bit entirely
        j.priority = high_priority_queue_id >= 0 && static_cast<long long>(f[16]) == high_priority_queue_id ? 1 : 0;

        if (j.size <= 0 || j.actual_runtime <= 0) {
            ++result.skipped_lines;
            continue;
        }
        result.jobset.jobs.push_back(j);
    }

    if (result.jobset.jobs.empty())
        throw std::runtime_error("empty trace: no usable jobs found");
    result.jobset.sort_jobs();
    return result;
}

namespace detail {

// Exact-round-trip number formatting: integers print bare, everything else
// with enough digits to reparse bit-identically.
inline std::string format_time(double v) {
    char buf[40];
    if (v == std::floor(v) && std::fabs(v) < 1e15)
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    else
        std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void emit_swf(const JobSet& set, std::ostream& out, long long high_priority_queue_id = -1) {
    out << "; label: " << set.label << "\n";
    out << "; source: " << to_string(set.source) << "\n";
    for (const Job& j : set.jobs) {
        long long marker = j.priority == 1 && high_priority_queue_id >= 0 ? high_priority_queue_id
                           : j.priority == 1                              ? 1
                                                                          : 0;
        out << j.id << ' ' << detail::format_time(j.submit_time) << " -1 "
            << detail::format_time(j.actual_runtime) << ' ' << j.size << " -1 -1 " << j.size << ' '
            << detail::format_time(j.runtime_estimate) << " -1 1 -1 -1 -1 -1 -1 " << marker << " -1\n";
    }
}

} // namespace dras
