#include "valvebench/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace valvebench {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
        if ((line[i] == '#' || line[i] == ';') &&
            (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
            return line.substr(0, i);
    }
    return line;
}

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, Entry>> entries;
    mutable bool used = false;

    const Entry* find(const std::string& key) const {
        for (const auto& [k, e] : entries)
            if (k == key) {
                e.used = true;
                return &e;
            }
        return nullptr;
    }
};

struct IniFile {
    std::string origin;
    std::vector<Section> sections;

    const Section* find(const std::string& name) const {
        for (const Section& s : sections)
            if (s.name == name) {
                s.used = true;
                return &s;
            }
        return nullptr;
    }
};

IniFile parse_ini(const std::string& text, const std::string& origin) {
    IniFile file;
    file.origin = origin;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            for (const Section& s : file.sections)
                if (s.name == name)
                    throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": duplicate section [" + name + "]");
            file.sections.push_back(Section{name, line_no, {}, false});
            current = &file.sections.back();
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        if (current == nullptr)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        for (const auto& [k, e] : current->entries)
            if (k == key)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "' in [" + current->name + "]");
        current->entries.emplace_back(key, Entry{value, line_no, false});
    }
    return file;
}

[[noreturn]] void bad_value(const IniFile& file, const std::string& section, const std::string& key,
                            const Entry& e, const std::string& expected) {
    throw ConfigError(file.origin + ":" + std::to_string(e.line) + ": key '" + section + "." + key +
                      "': cannot parse '" + e.value + "' as " + expected);
}

double get_double(const IniFile& file, const Section& s, const std::string& key, double dflt) {
    const Entry* e = s.find(key);
    if (!e) return dflt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        bad_value(file, s.name, key, *e, "a number");
    }
}

std::uint64_t get_u64(const IniFile& file, const Section& s, const std::string& key,
                      std::uint64_t dflt) {
    const Entry* e = s.find(key);
    if (!e) return dflt;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e->value, &pos);
        if (pos != e->value.size() || v < 0) throw std::invalid_argument("bad");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        bad_value(file, s.name, key, *e, "a non-negative integer");
    }
}

bool get_bool(const IniFile& file, const Section& s, const std::string& key, bool dflt) {
    const Entry* e = s.find(key);
    if (!e) return dflt;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(file, s.name, key, *e, "a boolean (true|false)");
}

std::string get_string(const Section& s, const std::string& key, const std::string& dflt) {
    const Entry* e = s.find(key);
    return e ? e->value : dflt;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

void check_known_keys(const IniFile& file, const Section& s,
                      const std::set<std::string>& known) {
    for (const auto& [key, e] : s.entries)
        if (!known.count(key))
            throw ConfigError(file.origin + ":" + std::to_string(e.line) + ": unknown key '" +
                              s.name + "." + key + "'");
}

WaveformSpec parse_segments(const IniFile& file, const Section& s, const Entry& e) {
    WaveformSpec spec;
    for (const std::string& part : split(e.value, ',')) {
        const std::vector<std::string> f = split(part, ':');
        if (f.size() != 3)
            throw ConfigError(file.origin + ":" + std::to_string(e.line) +
                              ": segment '" + part + "' must be kind:level:duration");
        Segment seg;
        seg.kind = segment_kind_from_string(f[0]);
        try {
            seg.target_level = std::stod(f[1]);
            seg.duration_s = std::stod(f[2]);
        } catch (const std::exception&) {
            bad_value(file, s.name, "segments", e, "kind:level:duration entries");
        }
        spec.segments.push_back(seg);
    }
    return spec;
}

NoiseSpec parse_noise_section(const IniFile& file, const Section& s) {
    check_known_keys(file, s,
                     {"kind", "mu", "sigma", "update_hz", "f_min", "f_max", "n_components",
                      "amplitude", "seed"});
    NoiseSpec n;
    n.kind = noise_kind_from_string(get_string(s, "kind", "gaussian_hold"));
    n.mu = get_double(file, s, "mu", 0.0);
    n.sigma = get_double(file, s, "sigma", 0.0);
    n.update_hz = get_double(file, s, "update_hz", 1.0);
    n.f_min = get_double(file, s, "f_min", 30.0);
    n.f_max = get_double(file, s, "f_max", 100.0);
    n.n_components = static_cast<int>(get_u64(file, s, "n_components", 8));
    n.amplitude = get_double(file, s, "amplitude", 1.0);
    n.seed = get_u64(file, s, "seed", 0);
    return n;
}

GradeSpec parse_grade_section(const IniFile& file, const Section& s) {
    check_known_keys(file, s, {"label", "delay", "fs", "fd", "episodes", "stop_avg_reward"});
    GradeSpec g;
    const std::string suffix = s.name.size() > 6 ? s.name.substr(6) : s.name;
    g.label = get_string(s, "label", suffix);
    g.delay = get_double(file, s, "delay", 0.0);
    g.fs = get_double(file, s, "fs", 0.0);
    g.fd = get_double(file, s, "fd", 0.0);
    g.episodes = get_u64(file, s, "episodes", 1);
    if (s.find("stop_avg_reward"))
        g.stop_avg_reward = get_double(file, s, "stop_avg_reward", 0.0);
    return g;
}

ControllerSet parse_controllers(const IniFile& file, const Entry& e) {
    ControllerSet set{false, false, false};
    for (const std::string& name : split(e.value, ',')) {
        if (name == "pid")
            set.pid = true;
        else if (name == "rl")
            set.rl = true;
        else if (name == "two_move")
            set.two_move = true;
        else
            throw ConfigError(file.origin + ":" + std::to_string(e.line) +
                              ": unknown controller '" + name + "' (expected pid|rl|two_move)");
    }
    return set;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

RunConfig RunConfig::from_string(const std::string& text, const std::string& origin) {
    const IniFile file = parse_ini(text, origin);
    RunConfig cfg;

    if (const Section* s = file.find("time")) {
        check_known_keys(file, *s, {"ts", "horizon"});
        cfg.time.ts = get_double(file, *s, "ts", cfg.time.ts);
        cfg.time.horizon = get_u64(file, *s, "horizon", cfg.time.horizon);
    }
    if (const Section* s = file.find("valve")) {
        check_known_keys(file, *s, {"fs", "fd"});
        cfg.valve.fs = get_double(file, *s, "fs", cfg.valve.fs);
        cfg.valve.fd = get_double(file, *s, "fd", cfg.valve.fd);
    }
    if (const Section* s = file.find("process")) {
        check_known_keys(file, *s, {"k", "T", "delay"});
        cfg.process.k = get_double(file, *s, "k", cfg.process.k);
        cfg.process.t_const = get_double(file, *s, "T", cfg.process.t_const);
        cfg.process.delay = get_double(file, *s, "delay", cfg.process.delay);
    }
    if (const Section* s = file.find("perturb")) {
        check_known_keys(file, *s, {"enabled", "tau"});
        cfg.perturb_enabled = get_bool(file, *s, "enabled", false);
        if (const Entry* e = s->find("tau")) {
            std::string v = e->value;
            v.erase(std::remove(v.begin(), v.end(), '['), v.end());
            v.erase(std::remove(v.begin(), v.end(), ']'), v.end());
            const std::vector<std::string> parts = split(v, ',');
            if (parts.size() != 3)
                throw ConfigError(file.origin + ":" + std::to_string(e->line) +
                                  ": perturb.tau needs exactly 3 time constants");
            try {
                cfg.perturb.tau1 = std::stod(parts[0]);
                cfg.perturb.tau2 = std::stod(parts[1]);
                cfg.perturb.tau3 = std::stod(parts[2]);
            } catch (const std::exception&) {
                bad_value(file, "perturb", "tau", *e, "a list of 3 numbers");
            }
        }
    }
    if (const Section* s = file.find("pid")) {
        check_known_keys(file, *s, {"kp", "ki", "kd", "n"});
        cfg.pid.kp = get_double(file, *s, "kp", cfg.pid.kp);
        cfg.pid.ki = get_double(file, *s, "ki", cfg.pid.ki);
        cfg.pid.kd = get_double(file, *s, "kd", cfg.pid.kd);
        cfg.pid.n = get_double(file, *s, "n", cfg.pid.n);
    }
    if (const Section* s = file.find("agent")) {
        check_known_keys(file, *s,
                         {"gamma", "critic_lr", "actor_lr", "batch_size", "tau",
                          "replay_capacity", "ou_variance", "ou_variance_decay", "ou_mean",
                          "ou_mean_attraction", "action_low", "action_high"});
        cfg.agent.gamma = get_double(file, *s, "gamma", cfg.agent.gamma);
        cfg.agent.critic_lr = get_double(file, *s, "critic_lr", cfg.agent.critic_lr);
        cfg.agent.actor_lr = get_double(file, *s, "actor_lr", cfg.agent.actor_lr);
        cfg.agent.batch_size = get_u64(file, *s, "batch_size", cfg.agent.batch_size);
        cfg.agent.tau = get_double(file, *s, "tau", cfg.agent.tau);
        cfg.agent.replay_capacity = get_u64(file, *s, "replay_capacity", cfg.agent.replay_capacity);
        cfg.agent.ou_variance = get_double(file, *s, "ou_variance", cfg.agent.ou_variance);
        cfg.agent.ou_variance_decay =
            get_double(file, *s, "ou_variance_decay", cfg.agent.ou_variance_decay);
        cfg.agent.ou_mean = get_double(file, *s, "ou_mean", cfg.agent.ou_mean);
        cfg.agent.ou_mean_attraction =
            get_double(file, *s, "ou_mean_attraction", cfg.agent.ou_mean_attraction);
        cfg.agent.action_low = get_double(file, *s, "action_low", cfg.agent.action_low);
        cfg.agent.action_high = get_double(file, *s, "action_high", cfg.agent.action_high);
    }
    if (const Section* s = file.find("env")) {
        check_known_keys(file, *s,
                         {"max_flow", "ref_min", "ref_max", "episode_steps", "delta", "lambda",
                          "reward_cap", "penalty", "normalize_obs", "log_steps"});
        cfg.env.max_flow = get_double(file, *s, "max_flow", cfg.env.max_flow);
        cfg.env.ref_min = get_double(file, *s, "ref_min", cfg.env.ref_min);
        cfg.env.ref_max = get_double(file, *s, "ref_max", cfg.env.ref_max);
        cfg.env.episode_steps = get_u64(file, *s, "episode_steps", cfg.env.episode_steps);
        cfg.env.delta = get_double(file, *s, "delta", cfg.env.delta);
        cfg.env.lambda = get_double(file, *s, "lambda", cfg.env.lambda);
        cfg.env.reward_cap = get_double(file, *s, "reward_cap", cfg.env.reward_cap);
        cfg.env.penalty = get_double(file, *s, "penalty", cfg.env.penalty);
        cfg.env.normalize_obs = get_bool(file, *s, "normalize_obs", cfg.env.normalize_obs);
        cfg.log_steps = get_bool(file, *s, "log_steps", cfg.log_steps);
    }
    if (const Section* s = file.find("reward")) {
        check_known_keys(file, *s, {"kind"});
        cfg.env.reward_kind = reward_kind_from_string(get_string(*s, "kind", "hybrid"));
    }
    if (const Section* s = file.find("reference")) {
        check_known_keys(file, *s, {"segments"});
        if (const Entry* e = s->find("segments")) cfg.reference = parse_segments(file, *s, *e);
    }
    if (const Section* s = file.find("noise.controller_input"))
        cfg.noise_controller_input = parse_noise_section(file, *s);
    if (const Section* s = file.find("noise.plant_input"))
        cfg.noise_plant_input = parse_noise_section(file, *s);
    if (const Section* s = file.find("noise.plant_output"))
        cfg.noise_plant_output = parse_noise_section(file, *s);
    if (const Section* s = file.find("two_move")) {
        check_known_keys(file, *s, {"a", "fs_hat", "fd_hat", "x_ss_hat"});
        TwoMoveParams tm;
        if (!s->find("a"))
            throw ConfigError(file.origin + ": key 'two_move.a' is required (no default exists)");
        tm.a = get_double(file, *s, "a", 1.0);
        tm.fs_hat = get_double(file, *s, "fs_hat", cfg.valve.fs);
        tm.fd_hat = get_double(file, *s, "fd_hat", cfg.valve.fd);
        tm.x_ss_hat = get_double(file, *s, "x_ss_hat", 0.0);
        cfg.two_move = tm;
    }
    if (const Section* s = file.find("experiment")) {
        check_known_keys(file, *s, {"id", "duration", "controllers", "seed"});
        cfg.experiment_id = get_string(*s, "id", "");
        if (s->find("duration"))
            cfg.experiment_duration_s = get_double(file, *s, "duration", 0.0);
        if (const Entry* e = s->find("controllers"))
            cfg.controllers = parse_controllers(file, *e);
        cfg.seed = get_u64(file, *s, "seed", cfg.seed);
    }

    // Grades: inline [grade.*] sections, or a separate curriculum file.
    std::vector<GradeSpec> grades;
    for (const Section& s : file.sections) {
        if (s.name.rfind("grade.", 0) == 0) {
            s.used = true;
            grades.push_back(parse_grade_section(file, s));
        }
    }
    if (const Section* s = file.find("curriculum")) {
        check_known_keys(file, *s, {"file"});
        const std::string path = get_string(*s, "file", "");
        if (!path.empty()) {
            if (!grades.empty())
                throw ConfigError(file.origin +
                                  ": both [grade.*] sections and curriculum.file are set");
            const IniFile cur = parse_ini(read_file(path), path);
            for (const Section& cs : cur.sections) {
                if (cs.name.rfind("grade.", 0) != 0)
                    throw ConfigError(path + ":" + std::to_string(cs.line) +
                                      ": curriculum files may only contain [grade.*] sections");
                grades.push_back(parse_grade_section(cur, cs));
            }
        }
    }
    if (!grades.empty()) cfg.curriculum = Curriculum{std::move(grades)};

    // Anything not consumed above is unknown.
    for (const Section& s : file.sections) {
        if (!s.used)
            throw ConfigError(file.origin + ":" + std::to_string(s.line) + ": unknown section [" +
                              s.name + "]");
        for (const auto& [key, e] : s.entries)
            if (!e.used)
                throw ConfigError(file.origin + ":" + std::to_string(e.line) + ": unknown key '" +
                                  s.name + "." + key + "'");
    }

    cfg.env.ts = cfg.time.ts;
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    return from_string(read_file(path), path);
}

void RunConfig::validate() const {
    time.validate();
    valve.validate();
    process.validate();
    pid.validate();
    agent.validate();
    env.validate();
    if (perturb_enabled) perturb.validate();
    if (curriculum) curriculum->validate();
    if (two_move) two_move->validate();
    if (!experiment_id.empty() && !is_valid_experiment_id(experiment_id))
        throw ConfigError("experiment.id '" + experiment_id + "' is not a known experiment");
}

namespace {

void put(std::string& out, const std::string& key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += key;
    out += '=';
    out += buf;
    out += '\n';
}

void put(std::string& out, const std::string& key, std::uint64_t v) {
    out += key;
    out += '=';
    out += std::to_string(v);
    out += '\n';
}

void put(std::string& out, const std::string& key, const std::string& v) {
    out += key;
    out += '=';
    out += v;
    out += '\n';
}

void put_noise(std::string& out, const std::string& prefix, const std::optional<NoiseSpec>& n) {
    if (!n) return;
    put(out, prefix + ".kind", std::string(n->kind == NoiseKind::GaussianHold ? "gaussian_hold"
                                                                              : "sine_mix"));
    put(out, prefix + ".mu", n->mu);
    put(out, prefix + ".sigma", n->sigma);
    put(out, prefix + ".update_hz", n->update_hz);
    put(out, prefix + ".f_min", n->f_min);
    put(out, prefix + ".f_max", n->f_max);
    put(out, prefix + ".n_components", static_cast<std::uint64_t>(n->n_components));
    put(out, prefix + ".amplitude", n->amplitude);
    put(out, prefix + ".seed", n->seed);
}

} // namespace

std::string RunConfig::canonical_string() const {
    std::string out;
    put(out, "time.ts", time.ts);
    put(out, "time.horizon", static_cast<std::uint64_t>(time.horizon));
    put(out, "valve.fs", valve.fs);
    put(out, "valve.fd", valve.fd);
    put(out, "process.k", process.k);
    put(out, "process.T", process.t_const);
    put(out, "process.delay", process.delay);
    put(out, "perturb.enabled", std::string(perturb_enabled ? "true" : "false"));
    put(out, "perturb.tau1", perturb.tau1);
    put(out, "perturb.tau2", perturb.tau2);
    put(out, "perturb.tau3", perturb.tau3);
    put(out, "pid.kp", pid.kp);
    put(out, "pid.ki", pid.ki);
    put(out, "pid.kd", pid.kd);
    put(out, "pid.n", pid.n);
    put(out, "agent.gamma", agent.gamma);
    put(out, "agent.critic_lr", agent.critic_lr);
    put(out, "agent.actor_lr", agent.actor_lr);
    put(out, "agent.batch_size", static_cast<std::uint64_t>(agent.batch_size));
    put(out, "agent.tau", agent.tau);
    put(out, "agent.replay_capacity", static_cast<std::uint64_t>(agent.replay_capacity));
    put(out, "agent.ou_variance", agent.ou_variance);
    put(out, "agent.ou_variance_decay", agent.ou_variance_decay);
    put(out, "agent.ou_mean", agent.ou_mean);
    put(out, "agent.ou_mean_attraction", agent.ou_mean_attraction);
    put(out, "agent.action_low", agent.action_low);
    put(out, "agent.action_high", agent.action_high);
    put(out, "env.max_flow", env.max_flow);
    put(out, "env.ref_min", env.ref_min);
    put(out, "env.ref_max", env.ref_max);
    put(out, "env.episode_steps", static_cast<std::uint64_t>(env.episode_steps));
    put(out, "env.delta", env.delta);
    put(out, "env.lambda", env.lambda);
    put(out, "env.reward_cap", env.reward_cap);
    put(out, "env.penalty", env.penalty);
    put(out, "env.normalize_obs", std::string(env.normalize_obs ? "true" : "false"));
    put(out, "env.log_steps", std::string(log_steps ? "true" : "false"));
    put(out, "reward.kind",
        std::string(env.reward_kind == RewardKind::Hybrid ? "hybrid" : "discrete"));
    if (reference) {
        std::string segs;
        for (const Segment& s : reference->segments) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s:%.17g:%.17g;", to_string(s.kind).c_str(),
                          s.target_level, s.duration_s);
            segs += buf;
        }
        put(out, "reference.segments", segs);
    }
    put_noise(out, "noise.controller_input", noise_controller_input);
    put_noise(out, "noise.plant_input", noise_plant_input);
    put_noise(out, "noise.plant_output", noise_plant_output);
    if (curriculum) {
        for (std::size_t i = 0; i < curriculum->grades.size(); ++i) {
            const GradeSpec& g = curriculum->grades[i];
            const std::string p = "grade." + std::to_string(i);
            put(out, p + ".label", g.label);
            put(out, p + ".delay", g.delay);
            put(out, p + ".fs", g.fs);
            put(out, p + ".fd", g.fd);
            put(out, p + ".episodes", static_cast<std::uint64_t>(g.episodes));
            if (g.stop_avg_reward) put(out, p + ".stop_avg_reward", *g.stop_avg_reward);
        }
    }
    if (two_move) {
        put(out, "two_move.a", two_move->a);
        put(out, "two_move.fs_hat", two_move->fs_hat);
        put(out, "two_move.fd_hat", two_move->fd_hat);
        put(out, "two_move.x_ss_hat", two_move->x_ss_hat);
    }
    if (!experiment_id.empty()) put(out, "experiment.id", experiment_id);
    if (experiment_duration_s) put(out, "experiment.duration", *experiment_duration_s);
    if (controllers) {
        std::string names;
        for (ControllerKind k : controllers->list()) names += to_string(k) + ",";
        put(out, "experiment.controllers", names);
    }
    put(out, "experiment.seed", seed);
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical_string()); }

} // namespace valvebench
