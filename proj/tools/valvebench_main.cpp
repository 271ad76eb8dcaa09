// valvebench — train, evaluate and inspect valve-control strategies.
//
// Commands:
//   train    run the graded-learning curriculum, emit checkpoints + reward CSV
//   eval     run a benchmark experiment with the configured controllers
//   doe      delay/friction design-of-experiments sweep with a trained agent
//   inspect  summarize a checkpoint file
//
// Exit codes: 0 success, 2 config error, 3 data/checkpoint error, 4 runtime failure.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "valvebench/checkpoint.hpp"
#include "valvebench/config.hpp"
#include "valvebench/csv.hpp"
#include "valvebench/curriculum.hpp"
#include "valvebench/experiment.hpp"
#include "valvebench/manifest.hpp"

namespace fs = std::filesystem;
using namespace valvebench;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void handle_signal(int) { g_interrupted = 1; }

struct CommonArgs {
    std::string config_path;
    std::string checkpoint_path;
    std::string experiment_id;
    std::string out_dir;
    std::int64_t seed_override = -1;
};

std::string resolve_out_dir(const CommonArgs& args) {
    if (!args.out_dir.empty()) return args.out_dir;
    if (const char* env = std::getenv("VALVEBENCH_OUT"); env && *env) return env;
    return "valvebench_out";
}

RunConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) throw ConfigError("--config is required");
    RunConfig cfg = RunConfig::load(args.config_path);
    if (args.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed_override);
    return cfg;
}

EnvFactory make_env_factory(const RunConfig& cfg) {
    return [cfg](const GradeSpec& grade) {
        ValveParams valve{grade.fs, grade.fd};
        FoptdParams process = cfg.process;
        process.delay = grade.delay;
        std::optional<PerturbParams> perturb;
        if (cfg.perturb_enabled) perturb = cfg.perturb;
        return ValveEnv(cfg.env, valve, process, perturb);
    };
}

void write_plot_script(const std::string& path, const std::vector<std::string>& trajectory_files) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "#!/usr/bin/env python3\n"
           "# Plots the trajectory CSVs produced alongside this script.\n"
           "import csv\n"
           "import matplotlib.pyplot as plt\n\n"
           "FILES = [";
    for (const std::string& f : trajectory_files) out << "\"" << f << "\", ";
    out << "]\n\n"
           "for name in FILES:\n"
           "    with open(name) as fh:\n"
           "        rows = list(csv.DictReader(fh))\n"
           "    t = [float(r[\"time\"]) for r in rows]\n"
           "    plt.figure(figsize=(10, 5))\n"
           "    plt.plot(t, [float(r[\"r\"]) for r in rows], \"k--\", label=\"reference\")\n"
           "    for key in rows[0]:\n"
           "        if key.startswith(\"y_\"):\n"
           "            plt.plot(t, [float(r[key]) for r in rows], label=key)\n"
           "    plt.xlabel(\"time [s]\")\n"
           "    plt.ylabel(\"flow\")\n"
           "    plt.title(name)\n"
           "    plt.legend()\n"
           "    plt.savefig(name.replace(\".csv\", \".png\"), dpi=120)\n"
           "    print(\"wrote\", name.replace(\".csv\", \".png\"))\n";
}

int cmd_train(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    const Curriculum curriculum = cfg.curriculum ? *cfg.curriculum : Curriculum::staged_default();
    curriculum.validate();

    const std::string out_dir = resolve_out_dir(args);
    fs::create_directories(out_dir);
    const std::uint64_t config_hash = cfg.hash();
    const std::string run_id = make_run_id(config_hash, cfg.seed);

    RunManifest manifest;
    manifest.run_id = run_id;
    manifest.command = "train";
    manifest.config_hash = config_hash;
    manifest.seed = cfg.seed;
    manifest.started = utc_timestamp();

    const std::string rewards_path = out_dir + "/" + run_id + "__rewards.csv";
    CsvWriter rewards(rewards_path, {"grade", "episode", "reward"});
    std::optional<CsvWriter> steps;
    std::string steps_path;
    if (cfg.log_steps) {
        steps_path = out_dir + "/" + run_id + "__steps.csv";
        steps.emplace(steps_path, std::vector<std::string>{"episode", "step", "r", "y", "e",
                                                           "action", "reward", "done"});
    }

    TrainOptions options;
    options.out_dir = out_dir;
    options.run_id = run_id;
    options.config_hash = config_hash;
    options.obs_scale = cfg.env.obs_scale();
    options.on_episode = [&](const std::string& grade, std::size_t episode, double total) {
        rewards.row(
            std::vector<std::string>{grade, std::to_string(episode), CsvWriter::format(total)});
        if (g_interrupted) throw std::runtime_error("interrupted by signal");
    };
    if (steps) {
        options.on_step = [&](std::size_t ep, std::size_t st, double r, double y, double e,
                              double action, double rew, bool done) {
            steps->row(std::vector<double>{static_cast<double>(ep), static_cast<double>(st), r, y,
                                           e, action, rew, done ? 1.0 : 0.0});
        };
    }

    const CurriculumResult result = run_curriculum(
        curriculum, cfg.agent, cfg.time.ts, cfg.seed, make_env_factory(cfg), options,
        args.checkpoint_path);

    manifest.files.push_back(fs::path(rewards_path).filename().string());
    if (!steps_path.empty()) manifest.files.push_back(fs::path(steps_path).filename().string());
    for (const GradeReport& r : result.reports)
        manifest.files.push_back(fs::path(r.checkpoint_path).filename().string());
    manifest.finished = utc_timestamp();
    manifest.complete = !result.error.has_value();
    write_manifest(out_dir + "/" + run_id + "__manifest.json", manifest);

    for (const GradeReport& r : result.reports) {
        const double last = r.rewards.empty() ? 0.0 : r.rewards.back();
        std::cout << r.label << ": " << r.episodes_run << " episodes, last reward "
                  << CsvWriter::format(last) << ", checkpoint "
                  << fs::path(r.checkpoint_path).filename().string() << "\n";
    }
    if (result.error) {
        std::cerr << "error: " << *result.error << "\n";
        return 4;
    }
    return 0;
}

void run_eval_case(const NamedExperiment& named, const ControllerSet& controllers,
                   const RlPolicy* policy, const std::string& out_dir,
                   const std::string& traj_name, CsvWriter& metrics_csv) {
    const ExperimentSpec& spec = named.spec;

    const std::vector<ControllerKind> kinds = controllers.list();
    std::vector<Trajectory> trajectories;
    for (ControllerKind kind : kinds) trajectories.push_back(run_closed_loop(spec, kind, policy));

    std::vector<std::string> header{"time", "r"};
    for (ControllerKind kind : kinds) {
        header.push_back("y_" + to_string(kind));
        header.push_back("u_" + to_string(kind));
        header.push_back("x_" + to_string(kind));
    }
    CsvWriter traj_csv(out_dir + "/" + traj_name, header);
    const std::size_t n = trajectories.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row{trajectories.front().time[i], trajectories.front().reference[i]};
        for (const Trajectory& t : trajectories) {
            row.push_back(t.output[i]);
            row.push_back(t.control[i]);
            row.push_back(t.valve_position[i]);
        }
        traj_csv.row(row);
    }

    for (std::size_t c = 0; c < kinds.size(); ++c) {
        const Metrics m = compute_metrics(trajectories[c], spec.ts);
        metrics_csv.row(std::vector<std::string>{
            to_string(kinds[c]), named.case_label, CsvWriter::format(m.iae),
            CsvWriter::format(m.ise), CsvWriter::format(m.overshoot_pct),
            CsvWriter::format(m.settling_time_s), CsvWriter::format(m.ripple),
            CsvWriter::format(m.steady_state_error)});
    }
}

int cmd_eval(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    const std::string id = !args.experiment_id.empty() ? args.experiment_id : cfg.experiment_id;
    if (id.empty()) throw ConfigError("--experiment is required (1|2|3a|3b|3c|4|5|6)");
    if (!is_valid_experiment_id(id)) throw ConfigError("unknown experiment id '" + id + "'");

    const ControllerSet controllers =
        cfg.controllers.value_or(ControllerSet{true, !args.checkpoint_path.empty(), false});
    if (!controllers.any()) throw ConfigError("experiment.controllers selects no controller");

    RlPolicy policy;
    if (controllers.rl) {
        if (args.checkpoint_path.empty())
            throw ConfigError("rl controller configured but --checkpoint missing");
        policy = RlPolicy::from_checkpoint(args.checkpoint_path);
    }
    if (controllers.two_move && !cfg.two_move)
        throw ConfigError("two_move controller configured but [two_move] section missing");

    PresetContext ctx;
    ctx.valve = cfg.valve;
    ctx.process = cfg.process;
    ctx.perturb = cfg.perturb;
    ctx.pid = cfg.pid;
    ctx.two_move = cfg.two_move;
    ctx.controllers = controllers;
    ctx.ts = cfg.time.ts;
    ctx.seed = cfg.seed;
    ctx.reference_override = cfg.reference;

    std::vector<NamedExperiment> cases = experiment_preset(id, ctx);
    for (NamedExperiment& c : cases) {
        if (cfg.experiment_duration_s) {
            c.spec.duration_s = *cfg.experiment_duration_s;
            c.spec.reference = c.spec.reference.truncated(c.spec.duration_s);
        }
        c.spec.max_flow = cfg.env.max_flow;
        // Noise sections in the config override the preset's choices.
        if (cfg.noise_controller_input) c.spec.noise_controller_input = cfg.noise_controller_input;
        if (cfg.noise_plant_input) c.spec.noise_plant_input = cfg.noise_plant_input;
        if (cfg.noise_plant_output) c.spec.noise_plant_output = cfg.noise_plant_output;
    }

    const std::string out_dir = resolve_out_dir(args);
    fs::create_directories(out_dir);
    const std::uint64_t config_hash = cfg.hash();
    const std::string run_id = make_run_id(config_hash, cfg.seed);

    RunManifest manifest;
    manifest.run_id = run_id;
    manifest.command = "eval " + id;
    manifest.config_hash = config_hash;
    manifest.seed = cfg.seed;
    manifest.started = utc_timestamp();

    CsvWriter metrics_csv(out_dir + "/metrics.csv",
                          {"controller", "case", "iae", "ise", "overshoot_pct", "settling_time_s",
                           "ripple", "steady_state_error"});

    std::vector<std::string> traj_files;
    for (const NamedExperiment& c : cases) {
        const std::string name =
            cases.size() == 1 ? "trajectory.csv" : "trajectory_" + c.case_label + ".csv";
        run_eval_case(c, controllers, controllers.rl ? &policy : nullptr, out_dir, name,
                      metrics_csv);
        traj_files.push_back(name);
    }

    write_plot_script(out_dir + "/plot.py", traj_files);

    manifest.files = traj_files;
    manifest.files.push_back("metrics.csv");
    manifest.files.push_back("plot.py");
    manifest.finished = utc_timestamp();
    write_manifest(out_dir + "/manifest.json", manifest);

    std::cout << "experiment " << id << ": wrote " << traj_files.size()
              << " trajectory file(s) to " << out_dir << "\n";
    return 0;
}

int cmd_doe(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    if (args.checkpoint_path.empty()) throw ConfigError("--checkpoint is required for doe");
    const RlPolicy policy = RlPolicy::from_checkpoint(args.checkpoint_path);

    ExperimentSpec base;
    base.valve = cfg.valve;
    base.process = cfg.process;
    base.pid = cfg.pid;
    base.controllers = ControllerSet{false, true, false};
    base.ts = cfg.time.ts;
    base.seed = cfg.seed;
    base.duration_s = cfg.experiment_duration_s.value_or(2000.0);
    base.max_flow = cfg.env.max_flow;
    base.reference = WaveformSpec::constant(100.0, base.duration_s);

    const std::vector<DoeCell> cells = run_doe(base, DoeLevels{}, policy);

    const std::string out_dir = resolve_out_dir(args);
    fs::create_directories(out_dir);
    const std::uint64_t config_hash = cfg.hash();
    const std::string run_id = make_run_id(config_hash, cfg.seed);

    RunManifest manifest;
    manifest.run_id = run_id;
    manifest.command = "doe";
    manifest.config_hash = config_hash;
    manifest.seed = cfg.seed;
    manifest.started = utc_timestamp();

    const std::string doe_path = out_dir + "/doe.csv";
    CsvWriter doe_csv(doe_path, {"L", "fs", "fd", "ripple", "settling", "iae"});
    for (const DoeCell& cell : cells)
        doe_csv.row(std::vector<double>{cell.delay, cell.fs, cell.fd, cell.metrics.ripple,
                                        cell.metrics.settling_time_s, cell.metrics.iae});

    manifest.files = {"doe.csv"};
    manifest.finished = utc_timestamp();
    write_manifest(out_dir + "/manifest.json", manifest);

    std::cout << "doe: wrote 4 cells to " << doe_path << "\n";
    return 0;
}

int cmd_inspect(const CommonArgs& args) {
    if (args.checkpoint_path.empty()) throw ConfigError("--checkpoint is required for inspect");
    const rl::CheckpointSummary s = rl::inspect_checkpoint(args.checkpoint_path);
    char hash_buf[24];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(s.meta.config_hash));
    std::cout << "checkpoint:  " << args.checkpoint_path << "\n"
              << "version:     " << s.version << "\n"
              << "grade:       " << s.meta.grade_label << "\n"
              << "created:     " << s.meta.created << "\n"
              << "config_hash: " << hash_buf << "\n"
              << "parameters:  " << s.param_count << "\n"
              << "obs_scale:   " << s.meta.obs_scale << "\n"
              << "ou_variance: " << s.meta.ou.variance << "\n";
    static const char* names[] = {"actor",       "critic.obs",        "critic.act",
                                  "critic.head", "target_actor",      "target_critic.obs",
                                  "target_critic.act", "target_critic.head"};
    for (std::size_t i = 0; i < s.net_shapes.size() && i < 8; ++i) {
        std::cout << names[i] << ": ";
        for (const nn::LayerSpec& spec : s.net_shapes[i])
            std::cout << spec.in_dim << "x" << spec.out_dim << "(" << nn::to_string(spec.act)
                      << ") ";
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    CLI::App app{"valvebench — RL vs PID valve-control workbench"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* cmd, bool with_experiment) {
        cmd->add_option("--config", args.config_path, "run configuration file");
        cmd->add_option("--seed", args.seed_override, "seed override");
        cmd->add_option("--checkpoint", args.checkpoint_path, "agent checkpoint path");
        cmd->add_option("--out", args.out_dir, "output directory (default $VALVEBENCH_OUT)");
        if (with_experiment)
            cmd->add_option("--experiment", args.experiment_id, "experiment id (1..6, 3a/3b/3c)");
    };

    CLI::App* train = app.add_subcommand("train", "run the graded-learning curriculum");
    add_common(train, false);
    CLI::App* eval = app.add_subcommand("eval", "run a benchmark experiment");
    add_common(eval, true);
    CLI::App* doe = app.add_subcommand("doe", "delay/friction DOE sweep");
    add_common(doe, false);
    CLI::App* inspect = app.add_subcommand("inspect", "summarize a checkpoint");
    add_common(inspect, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(args);
        if (eval->parsed()) return cmd_eval(args);
        if (doe->parsed()) return cmd_doe(args);
        if (inspect->parsed()) return cmd_inspect(args);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const DataError& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 4;
    }
    return 0;
}
