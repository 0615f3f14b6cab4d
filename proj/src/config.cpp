#include "pwfn/config.hpp"
#include "pwfn/clustering.hpp"
#include "pwfn/codebook.hpp"
#include "pwfn/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace pwfn {

namespace {

using json = nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) {
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
        }
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& into, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        // get<unsigned> would wrap negatives silently
        if (v.is_number_integer() && !v.is_number_unsigned()) {
            throw ConfigError("config: '" + std::string(key) + "' in " + where +
                              " must be non-negative");
        }
    }
    try {
        into = v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + std::string(key) + "' in " + where);
    }
}

} // namespace

std::string prior_mode_name(PriorMode m) {
    return m == PriorMode::uniform_prior ? "uniform_prior" : "powers_of_two_prior";
}

PriorMode prior_mode_from_name(const std::string& name) {
    if (name == "powers_of_two_prior") return PriorMode::powers_of_two_prior;
    if (name == "uniform_prior") return PriorMode::uniform_prior;
    throw ConfigError("config: prior_mode must be powers_of_two_prior or uniform_prior");
}

void RunConfig::validate() const {
    network.validate();
    if (schedule.size() != rounds_T) {
        throw ConfigError("config: schedule length must equal rounds_T");
    }
    FixingSchedule{schedule, epochs_per_round}.validate();
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("config: learning_rate must be positive");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ConfigError("config: momentum must be in [0,1)");
    }
    if (batch_size == 0) throw ConfigError("config: batch_size must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("config: alpha must be >= 0");
    }
    if (!(delta0 > 0.0) || !std::isfinite(delta0)) {
        throw ConfigError("config: delta0 must be positive");
    }
    if (!(sigma_cutoff_S > 0.0) || !std::isfinite(sigma_cutoff_S)) {
        throw ConfigError("config: sigma_cutoff_S must be positive");
    }
    BaseSetConfig{precision_b, top_j}.validate();
    if (ensemble_samples == 0) throw ConfigError("config: ensemble_samples must be >= 1");

    if (dataset.kind == "synthetic") {
        const auto& s = dataset.synthetic;
        if (s.n_classes < 2) throw ConfigError("config: synthetic n_classes must be >= 2");
        if (s.n_features == 0) throw ConfigError("config: synthetic n_features must be >= 1");
        if (s.n_train == 0 || s.n_test == 0) {
            throw ConfigError("config: synthetic n_train and n_test must be >= 1");
        }
        if (!std::isfinite(s.class_separation)) {
            throw ConfigError("config: class_separation must be finite");
        }
        if (s.n_features != network.layer_dims.front()) {
            throw ConfigError("config: synthetic n_features must match network input dim");
        }
        if (s.n_classes != network.layer_dims.back()) {
            throw ConfigError("config: synthetic n_classes must match network output dim");
        }
    } else if (dataset.kind == "csv") {
        const auto& c = dataset.csv;
        if (c.path.empty()) throw ConfigError("config: csv path must be set");
        if (c.label_column.empty()) throw ConfigError("config: csv label_column must be set");
        if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
            throw ConfigError("config: csv test_fraction must be in (0,1)");
        }
    } else {
        throw ConfigError("config: dataset.kind must be synthetic or csv");
    }
}

RunConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
    RunConfig cfg;
    const std::set<std::string> top_keys = {
        "network",      "dataset",        "rounds_T",    "epochs_per_round",
        "pretrain_epochs", "learning_rate", "momentum",   "batch_size",
        "alpha",        "delta0",         "sigma_cutoff_S", "precision_b",
        "top_j",        "schedule",       "seed",        "prior_mode",
        "ensemble_samples"};
    reject_unknown_keys(doc, top_keys, "config");

    if (doc.contains("network")) {
        const auto& n = doc.at("network");
        if (!n.is_object()) throw ConfigError("config: network must be an object");
        reject_unknown_keys(n, {"layer_dims", "bias_included"}, "network");
        read_field(n, "layer_dims", cfg.network.layer_dims, "network");
        read_field(n, "bias_included", cfg.network.bias_included, "network");
    }
    if (doc.contains("dataset")) {
        const auto& d = doc.at("dataset");
        if (!d.is_object()) throw ConfigError("config: dataset must be an object");
        read_field(d, "kind", cfg.dataset.kind, "dataset");
        if (cfg.dataset.kind == "synthetic") {
            reject_unknown_keys(d,
                                {"kind", "n_classes", "n_features", "n_train", "n_test",
                                 "class_separation", "seed"},
                                "dataset");
            auto& s = cfg.dataset.synthetic;
            read_field(d, "n_classes", s.n_classes, "dataset");
            read_field(d, "n_features", s.n_features, "dataset");
            read_field(d, "n_train", s.n_train, "dataset");
            read_field(d, "n_test", s.n_test, "dataset");
            read_field(d, "class_separation", s.class_separation, "dataset");
            read_field(d, "seed", s.seed, "dataset");
        } else if (cfg.dataset.kind == "csv") {
            reject_unknown_keys(
                d, {"kind", "path", "label_column", "standardize", "test_fraction", "seed"},
                "dataset");
            auto& c = cfg.dataset.csv;
            read_field(d, "path", c.path, "dataset");
            read_field(d, "label_column", c.label_column, "dataset");
            read_field(d, "standardize", c.standardize, "dataset");
            read_field(d, "test_fraction", c.test_fraction, "dataset");
            read_field(d, "seed", c.seed, "dataset");
        } else {
            throw ConfigError("config: dataset.kind must be synthetic or csv");
        }
    }
    read_field(doc, "rounds_T", cfg.rounds_T, "config");
    read_field(doc, "epochs_per_round", cfg.epochs_per_round, "config");
    read_field(doc, "pretrain_epochs", cfg.pretrain_epochs, "config");
    read_field(doc, "learning_rate", cfg.learning_rate, "config");
    read_field(doc, "momentum", cfg.momentum, "config");
    read_field(doc, "batch_size", cfg.batch_size, "config");
    read_field(doc, "alpha", cfg.alpha, "config");
    read_field(doc, "delta0", cfg.delta0, "config");
    read_field(doc, "sigma_cutoff_S", cfg.sigma_cutoff_S, "config");
    read_field(doc, "precision_b", cfg.precision_b, "config");
    read_field(doc, "top_j", cfg.top_j, "config");
    read_field(doc, "schedule", cfg.schedule, "config");
    read_field(doc, "seed", cfg.seed, "config");
    if (doc.contains("prior_mode")) {
        std::string name;
        read_field(doc, "prior_mode", name, "config");
        cfg.prior_mode = prior_mode_from_name(name);
    }
    read_field(doc, "ensemble_samples", cfg.ensemble_samples, "config");

    cfg.validate();
    return cfg;
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["network"] = {{"layer_dims", cfg.network.layer_dims},
                    {"bias_included", cfg.network.bias_included}};
    nlohmann::ordered_json d;
    d["kind"] = cfg.dataset.kind;
    if (cfg.dataset.kind == "synthetic") {
        d["n_classes"] = cfg.dataset.synthetic.n_classes;
        d["n_features"] = cfg.dataset.synthetic.n_features;
        d["n_train"] = cfg.dataset.synthetic.n_train;
        d["n_test"] = cfg.dataset.synthetic.n_test;
        d["class_separation"] = cfg.dataset.synthetic.class_separation;
        d["seed"] = cfg.dataset.synthetic.seed;
    } else {
        d["path"] = cfg.dataset.csv.path;
        d["label_column"] = cfg.dataset.csv.label_column;
        d["standardize"] = cfg.dataset.csv.standardize;
        d["test_fraction"] = cfg.dataset.csv.test_fraction;
        d["seed"] = cfg.dataset.csv.seed;
    }
    j["dataset"] = std::move(d);
    j["rounds_T"] = cfg.rounds_T;
    j["epochs_per_round"] = cfg.epochs_per_round;
    j["pretrain_epochs"] = cfg.pretrain_epochs;
    j["learning_rate"] = cfg.learning_rate;
    j["momentum"] = cfg.momentum;
    j["batch_size"] = cfg.batch_size;
    j["alpha"] = cfg.alpha;
    j["delta0"] = cfg.delta0;
    j["sigma_cutoff_S"] = cfg.sigma_cutoff_S;
    j["precision_b"] = cfg.precision_b;
    j["top_j"] = cfg.top_j;
    j["schedule"] = cfg.schedule;
    j["seed"] = cfg.seed;
    j["prior_mode"] = prior_mode_name(cfg.prior_mode);
    j["ensemble_samples"] = cfg.ensemble_samples;
    return j;
}

std::string config_echo(const RunConfig& cfg) {
    return config_to_json(cfg).dump();
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("config: cannot open: " + path);
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return config_from_json(doc);
}

void apply_override(nlohmann::json& doc, const std::string& keyval) {
    const auto eq = keyval.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("config: --set expects key=value, got '" + keyval + "'");
    }
    std::string key = keyval.substr(0, eq);
    const std::string raw = keyval.substr(eq + 1);

    std::string pointer = "/";
    for (char ch : key) pointer += (ch == '.') ? '/' : ch;
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    try {
        doc[nlohmann::json::json_pointer(pointer)] = std::move(value);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: cannot apply --set " + keyval + ": " + e.what());
    }
}

} // namespace pwfn
