#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dras/config.hpp"
#include "dras/csvio.hpp"
#include "dras/policies.hpp"
#include "dras/swf.hpp"
#include "dras/trainer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dras;

const std::vector<std::string> kTrainablePolicies = {"dras-pg", "dras-dql", "rl-noreserve"};

bool is_agent_policy(const std::string& name) {
    return name == "dras-pg" || name == "dras-dql" || name == "rl-noreserve";
}

AgentConfig agent_config_for(const RunConfig& cfg, const std::string& policy) {
    AgentConfig a = cfg.agent;
    a.kind = policy == "dras-dql" ? AgentKind::dql : AgentKind::pg;
    a.no_reservation = policy == "rl-noreserve";
    return a;
}

// --model accepts either a bare path (applied to every agent policy) or a
// comma-separated name=path list.
std::map<std::string, std::string> parse_model_spec(const std::string& spec) {
    std::map<std::string, std::string> out;
    if (spec.empty())
        return out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t eq = tok.find('=');
        if (eq == std::string::npos)
            out["*"] = tok;
        else
            out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

std::string model_for(const std::map<std::string, std::string>& models, const std::string& policy) {
    auto it = models.find(policy);
    if (it != models.end())
        return it->second;
    it = models.find("*");
    return it != models.end() ? it->second : "";
}

std::unique_ptr<SchedulerPolicy> make_policy(const std::string& name, const RunConfig& cfg,
                                             const std::string& model_path) {
    if (name == "fcfs")
        return std::make_unique<FcfsEasyPolicy>();
    if (name == "binpacking")
        return std::make_unique<BinPackingPolicy>();
    if (name == "random")
        return std::make_unique<RandomPolicy>();
    if (name == "optimization")
        return std::make_unique<OptimizationPolicy>(cfg.agent.reward_kind, cfg.agent.weights);
    if (is_agent_policy(name)) {
        AgentConfig acfg = agent_config_for(cfg, name);
        std::unique_ptr<DrasAgent> agent;
        if (!model_path.empty()) {
            LoadedModel model = load_model(model_path);
            agent = std::make_unique<DrasAgent>(acfg, std::move(model.params), std::move(model.adam), cfg.nodes);
        } else {
            agent = std::make_unique<DrasAgent>(DrasAgent::make(acfg, cfg.nodes, mix_seed(cfg.require_seed(), 0xA9E17)));
        }
        agent->set_mode(DrasAgent::Mode::frozen);
        return agent;
    }
    throw std::runtime_error("usage error: unknown policy '" + name + "'");
}

JobSet load_trace(const RunConfig& cfg, const std::string& trace_path) {
    if (trace_path.empty())
        throw std::runtime_error("usage error: no trace given (set `trace` in the config or pass --trace)");
    std::ifstream in(trace_path);
    if (!in)
        throw std::runtime_error("cannot open trace file: " + trace_path);
    SwfParseResult parsed = parse_swf(in, cfg.hp_queue_id, fs::path(trace_path).stem().string());
    return filter_jobs(parsed.jobset, cfg.min_job_size, true);
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty())
            out.push_back(tok);
    return out;
}

int cmd_inspect(const RunConfig& cfg, const std::string& trace_path, const std::string& out_dir) {
    if (trace_path.empty())
        throw std::runtime_error("usage error: inspect needs --trace");
    std::ifstream in(trace_path);
    if (!in)
        throw std::runtime_error("cannot open trace file: " + trace_path);
    SwfParseResult parsed = parse_swf(in, cfg.hp_queue_id, fs::path(trace_path).stem().string());
    WorkloadStats stats = compute_stats(parsed.jobset);
    write_stats_csv(std::cout, stats);
    if (!out_dir.empty()) {
        ensure_out_dir(out_dir);
        auto f = open_csv(out_dir + "/stats.csv");
        write_stats_csv(f, stats);
    }
    return 0;
}

int cmd_gen(const RunConfig& cfg) {
    JobSet trace = load_trace(cfg, cfg.trace_path);
    if (cfg.n_sampled + cfg.n_real + cfg.n_synthetic <= 0)
        throw std::runtime_error("usage error: empty curriculum (all phase counts are zero)");
    Curriculum cur = build_curriculum(trace, cfg.n_sampled, cfg.n_real, cfg.n_synthetic,
                                      cfg.effective_jobs_per_set(trace.jobs.size()),
                                      cfg.require_seed());
    ensure_out_dir(cfg.out_dir);
    std::map<CurriculumPhase, int> phase_no{{CurriculumPhase::sampled, 1},
                                            {CurriculumPhase::real, 2},
                                            {CurriculumPhase::synthetic, 3}};
    std::map<CurriculumPhase, int> index;
    for (const auto& [phase, set] : cur.entries) {
        std::string path = cfg.out_dir + "/phase" + std::to_string(phase_no[phase]) + "_" +
                           std::to_string(index[phase]++) + ".swf";
        std::ofstream out(path, std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open output file: " + path);
        emit_swf(set, out, cfg.hp_queue_id);
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& policy_name, const std::string& model_spec) {
    if (policy_name.empty())
        throw std::runtime_error("usage error: simulate needs --policy");
    JobSet trace = load_trace(cfg, cfg.trace_path);
    auto models = parse_model_spec(model_spec);
    std::unique_ptr<SchedulerPolicy> policy = make_policy(policy_name, cfg, model_for(models, policy_name));
    RewardFn reward = make_reward_fn(cfg.agent.reward_kind, cfg.agent.weights, cfg.agent.time_scale);
    SimulationResult result = run_simulation(trace, *policy, cfg.nodes, cfg.require_seed(), reward);

    ensure_out_dir(cfg.out_dir);
    {
        auto f = open_csv(cfg.out_dir + "/result.csv");
        write_result_csv(f, result);
    }
    {
        auto f = open_csv(cfg.out_dir + "/instances.csv");
        write_instances_csv(f, result);
    }
    {
        std::vector<std::pair<std::string, MetricsSummary>> summaries{
            {policy_name, compute_metrics(result, cfg.nodes)}};
        auto f = open_csv(cfg.out_dir + "/summary.csv");
        write_summary_csv(f, summaries);
    }
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& policy_name, const std::string& model_spec) {
    std::string policy = policy_name.empty() ? "dras-pg" : policy_name;
    if (!is_agent_policy(policy))
        throw std::runtime_error("usage error: train needs one of dras-pg, dras-dql, rl-noreserve");
    JobSet trace = load_trace(cfg, cfg.trace_path);
    Curriculum cur = build_curriculum(trace, cfg.n_sampled, cfg.n_real, cfg.n_synthetic,
                                      cfg.effective_jobs_per_set(trace.jobs.size()),
                                      cfg.require_seed());
    ensure_out_dir(cfg.out_dir);

    AgentConfig acfg = agent_config_for(cfg, policy);
    TrainResult result;
    auto models = parse_model_spec(model_spec);
    std::string init_path = model_for(models, policy);
    if (!init_path.empty()) {
        LoadedModel init = load_model(init_path);
        result = train_from(acfg, std::move(init), cur, cfg.nodes, cfg.require_seed(), cfg.out_dir, cfg.epochs);
    } else {
        result = train(acfg, cur, cfg.nodes, cfg.require_seed(), cfg.out_dir, cfg.epochs);
    }

    auto f = open_csv(cfg.out_dir + "/training_report.csv");
    write_training_report_csv(f, result.report);
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& policy_csv, const std::string& model_spec) {
    std::vector<std::string> names = split_names(policy_csv);
    if (names.size() < 2)
        throw std::runtime_error("usage error: evaluate needs at least two policies");
    JobSet trace = load_trace(cfg, cfg.trace_path);
    auto models = parse_model_spec(model_spec);
    RewardFn reward = make_reward_fn(cfg.agent.reward_kind, cfg.agent.weights, cfg.agent.time_scale);

    std::vector<SimulationResult> results;
    std::vector<std::pair<std::string, MetricsSummary>> summaries;
    for (const std::string& name : names) {
        std::unique_ptr<SchedulerPolicy> policy = make_policy(name, cfg, model_for(models, name));
        results.push_back(run_simulation(trace, *policy, cfg.nodes, cfg.require_seed(), reward));
        summaries.emplace_back(name, compute_metrics(results.back(), cfg.nodes));
    }

    ensure_out_dir(cfg.out_dir);
    {
        auto f = open_csv(cfg.out_dir + "/summary.csv");
        write_summary_csv(f, summaries);
    }
    {
        std::vector<std::pair<std::string, const SimulationResult*>> refs;
        for (std::size_t i = 0; i < names.size(); ++i)
            refs.emplace_back(names[i], &results[i]);
        auto f = open_csv(cfg.out_dir + "/waits.csv");
        write_waits_csv(f, refs);
    }
    {
        auto f = open_csv(cfg.out_dir + "/kiviat.csv");
        write_kiviat_csv(f, kiviat_normalize(summaries));
    }
    {
        auto f = open_csv(cfg.out_dir + "/modes.csv");
        write_modes_csv(f, summaries);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-driven HPC cluster scheduling simulator with RL scheduling agents"};
    app.require_subcommand(1);

    std::string config_path, trace_path, policy_csv, model_spec, out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd, bool with_policy, bool with_model) {
        cmd->add_option("--config", config_path, "configuration file (key = value)");
        cmd->add_option("--trace", trace_path, "SWF trace file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { seed = v; seed_given = true; }, "RNG seed");
        if (with_policy)
            cmd->add_option("--policy", policy_csv, "policy name(s): fcfs, binpacking, random, optimization, "
                                                    "dras-pg, dras-dql, rl-noreserve");
        if (with_model)
            cmd->add_option("--model", model_spec, "model file, or name=path[,name=path...]");
    };

    CLI::App* inspect = app.add_subcommand("inspect", "print workload statistics as CSV");
    add_common(inspect, false, false);
    CLI::App* gen = app.add_subcommand("gen", "generate curriculum jobsets as SWF files");
    add_common(gen, false, false);
    CLI::App* simulate = app.add_subcommand("simulate", "run one policy over a trace");
    add_common(simulate, true, true);
    CLI::App* train = app.add_subcommand("train", "train a scheduling agent");
    add_common(train, true, true);
    CLI::App* evaluate = app.add_subcommand("evaluate", "compare policies on one trace");
    add_common(evaluate, true, true);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        if (seed_given)
            cfg.seed = seed;
        if (!trace_path.empty())
            cfg.trace_path = trace_path;
        if (!out_dir.empty())
            cfg.out_dir = out_dir;

        if (app.got_subcommand(inspect))
            return cmd_inspect(cfg, cfg.trace_path, out_dir);
        if (app.got_subcommand(gen))
            return cmd_gen(cfg);
        if (app.got_subcommand(simulate))
            return cmd_simulate(cfg, policy_csv, model_spec);
        if (app.got_subcommand(train))
            return cmd_train(cfg, policy_csv, model_spec);
        if (app.got_subcommand(evaluate))
            return cmd_evaluate(cfg, policy_csv, model_spec);
        throw std::runtime_error("usage error: no subcommand");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
