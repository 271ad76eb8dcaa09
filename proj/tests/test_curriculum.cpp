#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "valvebench/checkpoint.hpp"
#include "valvebench/curriculum.hpp"

using namespace valvebench;
namespace fs = std::filesystem;

namespace {

EnvFactory quick_env_factory() {
    EnvConfig cfg;
    cfg.episode_steps = 20; // short episodes keep these tests fast
    return [cfg](const GradeSpec& grade) {
        return ValveEnv(cfg, ValveParams{grade.fs, grade.fd},
                        FoptdParams{3.8163, 156.46, grade.delay});
    };
}

rl::AgentConfig quick_agent_config() {
    rl::AgentConfig cfg;
    cfg.batch_size = 8;
    return cfg;
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("default schedule: seven rows totalling 8430 episodes") {
    const Curriculum c = Curriculum::staged_default();
    REQUIRE(c.grades.size() == 7);
    CHECK(c.total_episodes() == 8430);

    CHECK(c.grades[0].label == "Grade-I.1");
    CHECK(c.grades[0].delay == 0.1);
    CHECK(c.grades[0].fs == doctest::Approx(0.84));
    CHECK(c.grades[0].fd == doctest::Approx(0.3524));
    CHECK(c.grades[0].episodes == 930);

    CHECK(c.grades[1].label == "Grade-I.2");
    CHECK(c.grades[1].episodes == 2000);

    CHECK(c.grades[6].label == "Grade-VI");
    CHECK(c.grades[6].delay == 2.5);
    CHECK(c.grades[6].fs == 8.4);
    CHECK(c.grades[6].fd == 3.524);
    CHECK(c.grades[6].episodes == 2000);
}

TEST_CASE("run_grade: one episode yields one reward entry and a checkpoint") {
    TempDir dir("vb_grade_one");
    rl::Agent agent(quick_agent_config(), 1.0, 5);
    GradeSpec grade{"Smoke", 0.1, 0.84, 0.3524, 1, std::nullopt};
    SeededRng rng(5);
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "t";
    const GradeReport report = run_grade(agent, grade, quick_env_factory(), rng, options);
    CHECK(report.episodes_run == 1);
    CHECK(report.rewards.size() == 1);
    CHECK(fs::exists(report.checkpoint_path));
    CHECK(report.end_param_hash == agent.param_hash());
}

TEST_CASE("run_grade: a trivially met stop threshold stops at the window width") {
    TempDir dir("vb_grade_stop");
    rl::Agent agent(quick_agent_config(), 1.0, 6);
    GradeSpec grade{"Stop", 0.1, 0.84, 0.3524, 100,
                    -std::numeric_limits<double>::infinity()};
    SeededRng rng(6);
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "t";
    options.stop_window = 20;
    const GradeReport report = run_grade(agent, grade, quick_env_factory(), rng, options);
    CHECK(report.episodes_run == 20); // never earlier than a full window
}

TEST_CASE("run_grade: early stop never fires before the window is full") {
    TempDir dir("vb_grade_window");
    rl::Agent agent(quick_agent_config(), 1.0, 7);
    GradeSpec grade{"Win", 0.1, 0.84, 0.3524, 7, -1e18};
    SeededRng rng(7);
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "t";
    options.stop_window = 20;
    const GradeReport report = run_grade(agent, grade, quick_env_factory(), rng, options);
    CHECK(report.episodes_run == 7); // budget below window: runs everything
}

TEST_CASE("run_curriculum: weights hand off bit-identically between grades") {
    TempDir dir("vb_cur_handoff");
    Curriculum cur;
    cur.grades = {{"A", 0.1, 0.84, 0.3524, 1, std::nullopt},
                  {"B", 0.1, 0.84, 0.3524, 1, std::nullopt},
                  {"C", 0.1, 0.84, 0.3524, 1, std::nullopt}};
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "t";
    const CurriculumResult res =
        run_curriculum(cur, quick_agent_config(), 1.0, 11, quick_env_factory(), options);
    REQUIRE_FALSE(res.error.has_value());
    REQUIRE(res.reports.size() == 3);
    for (std::size_t i = 1; i < res.reports.size(); ++i)
        CHECK(res.reports[i].start_param_hash == res.reports[i - 1].end_param_hash);
    // Checkpoint completeness: one per attempted grade.
    CHECK(fs::exists(res.reports[0].checkpoint_path));
    CHECK(fs::exists(res.reports[1].checkpoint_path));
    CHECK(fs::exists(res.reports[2].checkpoint_path));
}

TEST_CASE("run_curriculum: second grade starts from trained weights, not a fresh init") {
    TempDir dir("vb_cur_transfer");
    Curriculum cur;
    cur.grades = {{"A", 0.1, 0.84, 0.3524, 3, std::nullopt},
                  {"B", 0.1, 0.84, 0.3524, 1, std::nullopt}};
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "t";
    const rl::AgentConfig agent_cfg = quick_agent_config();
    const CurriculumResult res =
        run_curriculum(cur, agent_cfg, 1.0, 13, quick_env_factory(), options);
    REQUIRE(res.reports.size() == 2);

    // Parameter distance from grade A's end to grade B's start is zero; a
    // fresh init differs. Compare through flattened actor parameters.
    rl::LoadedCheckpoint after_a = rl::load_checkpoint(res.reports[0].checkpoint_path);
    rl::Agent fresh(agent_cfg, 1.0, 13);
    const auto a_params = after_a.agent.actor().flatten();
    const auto fresh_params = fresh.actor().flatten();
    double dist_fresh = 0.0;
    for (std::size_t i = 0; i < a_params.size(); ++i)
        dist_fresh += std::abs(a_params[i] - fresh_params[i]);
    CHECK(res.reports[1].start_param_hash == res.reports[0].end_param_hash);
    CHECK(dist_fresh > 0.0); // training moved the weights off the fresh init
}

TEST_CASE("run_curriculum: single-grade curriculum matches run_grade") {
    TempDir dir("vb_cur_single");
    Curriculum cur;
    cur.grades = {{"Solo", 0.1, 0.84, 0.3524, 2, std::nullopt}};
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "t";
    const CurriculumResult res =
        run_curriculum(cur, quick_agent_config(), 1.0, 17, quick_env_factory(), options);
    REQUIRE(res.reports.size() == 1);

    rl::Agent agent(quick_agent_config(), 1.0, 17);
    agent.reset_exploration();
    agent.reset_replay();
    SeededRng rng = SeededRng(17).derive(1000);
    TrainOptions options2;
    options2.out_dir = dir.path.string();
    options2.run_id = "t2";
    const GradeReport direct = run_grade(agent, cur.grades[0], quick_env_factory(), rng, options2);
    CHECK(res.reports[0].rewards == direct.rewards);
    CHECK(res.reports[0].end_param_hash == direct.end_param_hash);
}

TEST_CASE("run_curriculum: env factory failure yields partial reports plus error") {
    TempDir dir("vb_cur_fail");
    Curriculum cur;
    cur.grades = {{"OK", 0.1, 0.84, 0.3524, 1, std::nullopt},
                  {"BAD", 0.1, 2.0, 8.0, 1, std::nullopt}}; // fd > fs rejected
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "t";
    const CurriculumResult res =
        run_curriculum(cur, quick_agent_config(), 1.0, 19, quick_env_factory(), options);
    CHECK(res.reports.size() == 1);
    REQUIRE(res.error.has_value());
    CHECK(res.error->find("BAD") != std::string::npos);
}

TEST_CASE("run_curriculum: resume skips grades up to the checkpoint's label") {
    TempDir dir("vb_cur_resume");
    Curriculum cur;
    cur.grades = {{"A", 0.1, 0.84, 0.3524, 1, std::nullopt},
                  {"B", 0.1, 0.84, 0.3524, 1, std::nullopt},
                  {"C", 0.1, 0.84, 0.3524, 1, std::nullopt}};
    TrainOptions options;
    options.out_dir = dir.path.string();
    options.run_id = "full";
    const CurriculumResult full =
        run_curriculum(cur, quick_agent_config(), 1.0, 23, quick_env_factory(), options);
    REQUIRE(full.reports.size() == 3);

    TrainOptions options2;
    options2.out_dir = dir.path.string();
    options2.run_id = "resumed";
    const CurriculumResult resumed =
        run_curriculum(cur, quick_agent_config(), 1.0, 23, quick_env_factory(), options2,
                       full.reports[1].checkpoint_path); // resume after B
    REQUIRE(resumed.reports.size() == 1);
    CHECK(resumed.reports[0].label == "C");
    CHECK(resumed.reports[0].start_param_hash == full.reports[1].end_param_hash);
}

TEST_CASE("checkpoint filenames combine run id and grade label") {
    CHECK(checkpoint_filename("run1", "Grade-I.1") == "run1__Grade-I.1.ckpt");
    CHECK(checkpoint_filename("a b", "x/y") == "a-b__x-y.ckpt");
}
