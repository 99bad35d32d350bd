#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/agent.hpp"

namespace dras {

// Flat `key = value` configuration with '#' comments. Two bundled profiles
// (conf/theta.conf, conf/cori.conf) encode the big-system constants; the desk
// profile (conf/desk.conf) is the small default everything is tested on.
struct RunConfig {
    // system profile
    int nodes = 64;
    double max_job_length = 86400.0;
    int min_job_size = 1;
    long long hp_queue_id = -1; // -1: no job is high priority

    // agent
    AgentConfig agent;

    // curriculum
    int n_sampled = 3;
    int n_real = 3;
    int n_synthetic = 6;
    std::size_t jobs_per_set = 0; // 0: one ninth of the training trace
    int epochs = 1;

    // paths and reporting
    std::string trace_path;
    std::string out_dir = "out";
    std::vector<int> size_buckets{8, 32};

    std::optional<std::uint64_t> seed; // mandatory before use; never wall-clock

    std::uint64_t require_seed() const {
        if (!seed)
            throw std::runtime_error("configuration error: no seed given (set `seed` or pass --seed)");
        return *seed;
    }

    std::size_t effective_jobs_per_set(std::size_t trace_job_count) const {
        if (jobs_per_set > 0)
            return jobs_per_set;
        return std::max<std::size_t>(1, trace_job_count / 9);
    }

    void finalize() {
        // encoding scales follow the system profile unless explicitly set
        agent.size_scale = static_cast<double>(nodes);
        agent.time_scale = max_job_length;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stoi(trim(tok)));
    return out;
}

} // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "nodes")
            cfg.nodes = std::stoi(value);
        else if (key == "max_job_length")
            cfg.max_job_length = std::stod(value);
        else if (key == "min_job_size")
            cfg.min_job_size = std::stoi(value);
        else if (key == "hp_queue_id")
            cfg.hp_queue_id = std::stoll(value);
        else if (key == "window")
            cfg.agent.window = std::stoi(value);
        else if (key == "reward")
            cfg.agent.reward_kind = reward_kind_from_string(value);
        else if (key == "w1")
            cfg.agent.weights.w1 = std::stod(value);
        else if (key == "w2")
            cfg.agent.weights.w2 = std::stod(value);
        else if (key == "w3")
            cfg.agent.weights.w3 = std::stod(value);
        else if (key == "gamma")
            cfg.agent.gamma = std::stod(value);
        else if (key == "alpha")
            cfg.agent.alpha = std::stod(value);
        else if (key == "update_every")
            cfg.agent.update_every = std::stoi(value);
        else if (key == "eps0")
            cfg.agent.eps0 = std::stod(value);
        else if (key == "eps_decay")
            cfg.agent.eps_decay = std::stod(value);
        else if (key == "eps_min")
            cfg.agent.eps_min = std::stod(value);
        else if (key == "h1")
            cfg.agent.h1 = static_cast<std::size_t>(std::stoul(value));
        else if (key == "h2")
            cfg.agent.h2 = static_cast<std::size_t>(std::stoul(value));
        else if (key == "n_sampled")
            cfg.n_sampled = std::stoi(value);
        else if (key == "n_real")
            cfg.n_real = std::stoi(value);
        else if (key == "n_synthetic")
            cfg.n_synthetic = std::stoi(value);
        else if (key == "jobs_per_set")
            cfg.jobs_per_set = static_cast<std::size_t>(std::stoul(value));
        else if (key == "epochs")
            cfg.epochs = std::stoi(value);
        else if (key == "trace")
            cfg.trace_path = value;
        else if (key == "out")
            cfg.out_dir = value;
        else if (key == "size_buckets")
            cfg.size_buckets = detail::parse_int_list(value);
        else if (key == "seed")
            cfg.seed = std::stoull(value);
        else
            throw std::runtime_error("configuration error: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("configuration error: bad value for '" + key + "': " + value);
    } catch (const std::out_of_range&) {
        throw std::runtime_error("configuration error: value out of range for '" + key + "': " + value);
    }
}

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("configuration error: line " + std::to_string(line_no) +
                                     ": expected key = value");
        apply_config_entry(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    cfg.finalize();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

} // namespace dras
