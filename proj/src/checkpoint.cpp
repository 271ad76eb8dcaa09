#include "valvebench/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace valvebench::rl {

namespace {

constexpr std::uint8_t kMagic[4] = {'V', 'B', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kNetCount = 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    put_u64(out, bits);
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void put_bytes(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& bytes) {
    put_u32(out, static_cast<std::uint32_t>(bytes.size()));
    out.insert(out.end(), bytes.begin(), bytes.end());
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, sizeof d);
        return d;
    }

    std::string string() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    std::vector<std::uint8_t> bytes() {
        const std::uint32_t n = u32();
        need(n);
        std::vector<std::uint8_t> b(bytes_.begin() + static_cast<long>(pos_),
                                    bytes_.begin() + static_cast<long>(pos_ + n));
        pos_ += n;
        return b;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw DataError("corrupt checkpoint: truncated file");
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

void put_agent_config(std::vector<std::uint8_t>& out, const AgentConfig& c) {
    put_f64(out, c.gamma);
    put_f64(out, c.critic_lr);
    put_f64(out, c.actor_lr);
    put_u64(out, c.batch_size);
    put_f64(out, c.tau);
    put_u64(out, c.replay_capacity);
    put_f64(out, c.ou_variance);
    put_f64(out, c.ou_variance_decay);
    put_f64(out, c.ou_mean);
    put_f64(out, c.ou_mean_attraction);
    put_f64(out, c.action_low);
    put_f64(out, c.action_high);
}

AgentConfig read_agent_config(Reader& r) {
    AgentConfig c;
    c.gamma = r.f64();
    c.critic_lr = r.f64();
    c.actor_lr = r.f64();
    c.batch_size = r.u64();
    c.tau = r.f64();
    c.replay_capacity = r.u64();
    c.ou_variance = r.f64();
    c.ou_variance_decay = r.f64();
    c.ou_mean = r.f64();
    c.ou_mean_attraction = r.f64();
    c.action_low = r.f64();
    c.action_high = r.f64();
    return c;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

struct ParsedCheckpoint {
    std::uint32_t version = 0;
    CheckpointMeta meta;
    std::vector<nn::DenseNet> nets;
};

ParsedCheckpoint parse(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DataError("corrupt checkpoint: bad magic bytes in '" + path + "'");
    Reader r(bytes);
    (void)r.u32();

    ParsedCheckpoint p;
    p.version = r.u32();
    if (p.version != kVersion)
        throw DataError("checkpoint version mismatch: got " + std::to_string(p.version) +
                        ", expected " + std::to_string(kVersion));
    p.meta.grade_label = r.string();
    p.meta.created = r.string();
    p.meta.config_hash = r.u64();
    p.meta.agent_config = read_agent_config(r);
    p.meta.obs_scale = r.f64();
    p.meta.ts = r.f64();
    p.meta.ou.x = r.f64();
    p.meta.ou.variance = r.f64();
    p.meta.ou.decay = r.f64();
    p.meta.ou.mean = r.f64();
    p.meta.ou.mean_attraction = r.f64();

    const std::uint32_t n_nets = r.u32();
    if (n_nets != kNetCount)
        throw DataError("corrupt checkpoint: unexpected network count");
    for (std::uint32_t i = 0; i < n_nets; ++i) {
        const std::vector<std::uint8_t> blob = r.bytes();
        p.nets.push_back(nn::net_deserialize(blob));
    }
    if (r.remaining() != 0)
        throw DataError("corrupt checkpoint: trailing bytes");
    return p;
}

} // namespace

void save_checkpoint(const std::string& path, const Agent& agent, const std::string& grade_label,
                     std::uint64_t config_hash, double obs_scale, const std::string& created) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kVersion);
    put_string(out, grade_label);
    put_string(out, created);
    put_u64(out, config_hash);
    put_agent_config(out, agent.config());
    put_f64(out, obs_scale);
    put_f64(out, agent.ts());
    put_f64(out, agent.ou().x);
    put_f64(out, agent.ou().variance);
    put_f64(out, agent.ou().decay);
    put_f64(out, agent.ou().mean);
    put_f64(out, agent.ou().mean_attraction);

    put_u32(out, kNetCount);
    // Order: actor, critic(obs, act, head), target actor, target critic(obs, act, head).
    put_bytes(out, nn::net_serialize(agent.actor()));
    put_bytes(out, nn::net_serialize(agent.critic().obs_path()));
    put_bytes(out, nn::net_serialize(agent.critic().act_path()));
    put_bytes(out, nn::net_serialize(agent.critic().head()));
    put_bytes(out, nn::net_serialize(agent.target_actor()));
    put_bytes(out, nn::net_serialize(agent.target_critic().obs_path()));
    put_bytes(out, nn::net_serialize(agent.target_critic().act_path()));
    put_bytes(out, nn::net_serialize(agent.target_critic().head()));

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write checkpoint '" + path + "'");
        f.write(reinterpret_cast<const char*>(out.data()), static_cast<long>(out.size()));
    }
    std::remove(path.c_str());
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw DataError("cannot finalize checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path, std::uint64_t rng_seed) {
    ParsedCheckpoint p = parse(path);

    Agent agent(p.meta.agent_config, p.meta.ts, rng_seed);
    Critic critic;
    critic.obs_path() = p.nets[1];
    critic.act_path() = p.nets[2];
    critic.head() = p.nets[3];
    Critic target_critic;
    target_critic.obs_path() = p.nets[5];
    target_critic.act_path() = p.nets[6];
    target_critic.head() = p.nets[7];
    agent.restore(p.nets[0], critic, p.nets[4], target_critic, p.meta.ou);
    return LoadedCheckpoint{p.meta, std::move(agent)};
}

CheckpointSummary inspect_checkpoint(const std::string& path) {
    ParsedCheckpoint p = parse(path);
    CheckpointSummary s;
    s.version = p.version;
    s.meta = p.meta;
    for (const nn::DenseNet& net : p.nets) {
        s.param_count += net.param_count();
        s.net_shapes.push_back(net.specs());
    }
    return s;
}

} // namespace valvebench::rl
