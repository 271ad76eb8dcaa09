#include "valvebench/curriculum.hpp"

#include <chrono>
#include <ctime>
#include <numeric>

#include "valvebench/checkpoint.hpp"

namespace valvebench {

namespace {

std::string utc_now_string() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ||
                       c == '_')
                          ? c
                          : '-');
    return out;
}

} // namespace

Curriculum Curriculum::staged_default() {
    const double fs = 8.4, fd = 3.524;
    Curriculum c;
    c.grades = {
        {"Grade-I.1", 0.1, fs / 10.0, fd / 10.0, 930, std::nullopt},
        {"Grade-I.2", 0.1, fs / 10.0, fd / 10.0, 2000, std::nullopt},
        {"Grade-II", 0.5, fs / 5.0, fd / 5.0, 1000, std::nullopt},
        {"Grade-III", 1.5, fs / 2.0, fd / 2.0, 1000, std::nullopt},
        {"Grade-IV", 1.5, fs * 2.0 / 3.0, fd * 2.0 / 3.0, 1000, std::nullopt},
        {"Grade-V", 2.0, fs * 2.0 / 3.0, fd * 2.0 / 3.0, 500, std::nullopt},
        {"Grade-VI", 2.5, fs, fd, 2000, std::nullopt},
    };
    return c;
}

std::string checkpoint_filename(const std::string& run_id, const std::string& grade_label) {
    return sanitize(run_id) + "__" + sanitize(grade_label) + ".ckpt";
}

GradeReport run_grade(rl::Agent& agent, const GradeSpec& grade, const EnvFactory& env_factory,
                      SeededRng& rng, const TrainOptions& options) {
    grade.validate();
    const auto t0 = std::chrono::steady_clock::now();

    GradeReport report;
    report.label = grade.label;
    report.start_param_hash = agent.param_hash();

    ValveEnv env = env_factory(grade);

    for (std::size_t ep = 0; ep < grade.episodes; ++ep) {
        Observation obs = env.reset(rng);
        std::array<double, 3> obs_vec = env.obs_vector(obs);
        double episode_reward = 0.0;
        std::size_t step_idx = 0;
        while (!env.done()) {
            const rl::Agent::ActResult act = agent.act_detailed(obs_vec, /*explore=*/true);
            const StepResult sr = env.step(act.action);
            const std::array<double, 3> next_vec = env.obs_vector(sr.obs);
            agent.observe(rl::Transition{obs_vec, act.raw, sr.reward, next_vec, sr.done});
            agent.learn_step();
            episode_reward += sr.reward;
            if (options.on_step)
                options.on_step(ep, step_idx, env.reference(), sr.obs.y, sr.obs.e, act.action,
                                sr.reward, sr.done);
            obs_vec = next_vec;
            ++step_idx;
        }
        report.rewards.push_back(episode_reward);
        ++report.episodes_run;
        if (options.on_episode) options.on_episode(grade.label, ep, episode_reward);

        if (grade.stop_avg_reward && report.rewards.size() >= options.stop_window) {
            const auto tail = report.rewards.end() - static_cast<long>(options.stop_window);
            const double avg = std::accumulate(tail, report.rewards.end(), 0.0) /
                               static_cast<double>(options.stop_window);
            if (avg >= *grade.stop_avg_reward) break;
        }
    }

    report.checkpoint_path =
        options.out_dir + "/" + checkpoint_filename(options.run_id, grade.label);
    rl::save_checkpoint(report.checkpoint_path, agent, grade.label, options.config_hash,
                        options.obs_scale, utc_now_string());
    report.end_param_hash = agent.param_hash();

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

CurriculumResult run_curriculum(const Curriculum& curriculum, const rl::AgentConfig& agent_config,
                                double ts, std::uint64_t agent_seed, const EnvFactory& env_factory,
                                const TrainOptions& options,
                                const std::string& resume_checkpoint) {
    curriculum.validate();
    CurriculumResult result;

    rl::Agent agent(agent_config, ts, agent_seed);
    std::size_t first_grade = 0;
    std::string prior_checkpoint = resume_checkpoint;

    if (!resume_checkpoint.empty()) {
        // Resume: continue after the grade the checkpoint was written for.
        rl::LoadedCheckpoint loaded = rl::load_checkpoint(resume_checkpoint, agent_seed);
        bool found = false;
        for (std::size_t i = 0; i < curriculum.grades.size(); ++i) {
            if (curriculum.grades[i].label == loaded.meta.grade_label) {
                first_grade = i + 1;
                found = true;
                break;
            }
        }
        if (!found)
            throw DataError("resume checkpoint grade '" + loaded.meta.grade_label +
                            "' is not in the curriculum");
    }

    for (std::size_t i = first_grade; i < curriculum.grades.size(); ++i) {
        const GradeSpec& grade = curriculum.grades[i];
        try {
            if (!prior_checkpoint.empty()) {
                // Weight continuity flows through the checkpoint file.
                rl::LoadedCheckpoint loaded =
                    rl::load_checkpoint(prior_checkpoint, SeededRng(agent_seed).derive(i).seed());
                agent = std::move(loaded.agent);
            }
            agent.reset_exploration();
            agent.reset_replay();

            SeededRng grade_rng = SeededRng(agent_seed).derive(1000 + i);
            GradeReport report = run_grade(agent, grade, env_factory, grade_rng, options);
            prior_checkpoint = report.checkpoint_path;
            result.reports.push_back(std::move(report));
        } catch (const std::exception& ex) {
            result.error = std::string("grade '") + grade.label + "' failed: " + ex.what();
            break;
        }
    }
    return result;
}

} // namespace valvebench
