#include "pwfn/checkpoint.hpp"
#include "pwfn/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian and this code writes host bytes");

namespace pwfn {

namespace {

using json = nlohmann::ordered_json;

void append_raw(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

template <typename T>
void append_scalar(std::string& out, T v) {
    append_raw(out, &v, sizeof(v));
}

struct ByteReader {
    const std::string& buf;
    std::size_t pos = 0;

    void read(void* dst, std::size_t n) {
        if (pos + n > buf.size()) throw IoError("checkpoint: truncated file");
        std::memcpy(dst, buf.data() + pos, n);
        pos += n;
    }

    template <typename T>
    T scalar() {
        T v;
        read(&v, sizeof(v));
        return v;
    }
};

json header_json(const Checkpoint& c) {
    json h;
    h["phase"] = c.phase;
    h["rounds_completed"] = c.rounds_completed;
    h["network"] = {{"layer_dims", c.network.layer_dims},
                    {"bias_included", c.network.bias_included}};
    auto tensors = json::array();
    for (const auto& t : c.store.tensors) {
        tensors.push_back({{"name", t.name},
                           {"rows", t.rows},
                           {"cols", t.cols},
                           {"count", t.size()}});
    }
    h["tensors"] = std::move(tensors);
    h["codebook"] = {{"precision_b", c.base.precision_b},
                     {"top_j", c.base.top_j},
                     {"achieved_omega", c.achieved_omega},
                     {"used_centers", c.used.ints}};
    h["rng"] = c.rng.s;
    h["pretrain_train_accuracy"] = c.pretrain_train_accuracy;
    h["pretrain_test_accuracy"] = c.pretrain_test_accuracy;
    h["entropy_by_round"] = c.entropy_by_round;
    h["fixed_by_round"] = c.fixed_by_round;
    h["config"] = c.config_json.empty() ? json::object() : json::parse(c.config_json);
    return h;
}

} // namespace

void snap_store_to_float32(WeightStore& store) {
    for (auto& t : store.tensors) {
        for (double& m : t.mu) m = static_cast<double>(static_cast<float>(m));
        for (double& s : t.sigma) s = static_cast<double>(static_cast<float>(s));
    }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const std::string header = header_json(ckpt).dump();

    std::string out;
    out.reserve(16 + header.size() + ckpt.store.total() * 13);
    append_raw(out, "PWFN", 4);
    append_scalar<std::uint32_t>(out, kCheckpointVersion);
    append_scalar<std::uint64_t>(out, header.size());
    out += header;

    for (const auto& t : ckpt.store.tensors) {
        for (double m : t.mu) append_scalar<float>(out, static_cast<float>(m));
        for (double s : t.sigma) append_scalar<float>(out, static_cast<float>(s));
        for (std::uint8_t f : t.fixed) append_scalar<std::uint8_t>(out, f);
        for (std::uint32_t ci : t.cluster) append_scalar<std::uint32_t>(out, ci);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("checkpoint: cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("checkpoint: cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string buf = ss.str();

    ByteReader r{buf};
    char magic[4];
    r.read(magic, 4);
    if (std::memcmp(magic, "PWFN", 4) != 0) throw IoError("checkpoint: bad magic");
    const auto version = r.scalar<std::uint32_t>();
    if (version != kCheckpointVersion) {
        throw IoError("checkpoint: unsupported version " + std::to_string(version));
    }
    const auto header_len = r.scalar<std::uint64_t>();
    if (r.pos + header_len > buf.size()) throw IoError("checkpoint: truncated header");
    json h;
    try {
        h = json::parse(buf.substr(r.pos, header_len));
    } catch (const json::exception& e) {
        throw IoError(std::string("checkpoint: malformed header: ") + e.what());
    }
    r.pos += header_len;

    Checkpoint c;
    try {
        c.phase = h.at("phase").get<std::string>();
        c.rounds_completed = h.at("rounds_completed").get<std::size_t>();
        c.network.layer_dims = h.at("network").at("layer_dims").get<std::vector<std::size_t>>();
        c.network.bias_included = h.at("network").at("bias_included").get<bool>();
        c.network.validate();

        c.base.precision_b = h.at("codebook").at("precision_b").get<int>();
        c.base.top_j = h.at("codebook").at("top_j").get<int>();
        c.base.validate();
        c.achieved_omega = h.at("codebook").at("achieved_omega").get<int>();
        c.used.ints = h.at("codebook").at("used_centers").get<std::vector<std::int64_t>>();
        c.used.values.reserve(c.used.ints.size());
        for (std::int64_t ci : c.used.ints) {
            c.used.values.push_back(static_cast<double>(ci) * c.base.scale());
        }

        const auto rng_words = h.at("rng").get<std::vector<std::uint64_t>>();
        if (rng_words.size() != 4) throw IoError("checkpoint: rng state must be 4 words");
        std::copy(rng_words.begin(), rng_words.end(), c.rng.s.begin());

        c.pretrain_train_accuracy = h.at("pretrain_train_accuracy").get<double>();
        c.pretrain_test_accuracy = h.at("pretrain_test_accuracy").get<double>();
        c.entropy_by_round = h.at("entropy_by_round").get<std::vector<double>>();
        c.fixed_by_round = h.at("fixed_by_round").get<std::vector<std::size_t>>();
        c.config_json = h.at("config").dump();

        c.store = WeightStore::from_spec(c.network);
        const auto tensors = h.at("tensors");
        if (tensors.size() != c.store.tensors.size()) {
            throw IoError("checkpoint: tensor list does not match network shape");
        }
        for (std::size_t ti = 0; ti < c.store.tensors.size(); ++ti) {
            auto& t = c.store.tensors[ti];
            const auto& desc = tensors.at(ti);
            if (desc.at("name").get<std::string>() != t.name ||
                desc.at("rows").get<std::size_t>() != t.rows ||
                desc.at("cols").get<std::size_t>() != t.cols ||
                desc.at("count").get<std::size_t>() != t.size()) {
                throw IoError("checkpoint: tensor descriptor mismatch for " + t.name);
            }
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("checkpoint: header field error: ") + e.what());
    }

    for (auto& t : c.store.tensors) {
        for (double& m : t.mu) m = static_cast<double>(r.scalar<float>());
        for (double& s : t.sigma) s = static_cast<double>(r.scalar<float>());
        for (std::uint8_t& fl : t.fixed) fl = r.scalar<std::uint8_t>();
        for (std::uint32_t& ci : t.cluster) ci = r.scalar<std::uint32_t>();
    }
    if (r.pos != buf.size()) throw IoError("checkpoint: trailing bytes");
    return c;
}

} // namespace pwfn
