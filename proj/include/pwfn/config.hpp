#pragma once

#include "pwfn/dataset.hpp"
#include "pwfn/network.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pwfn {

enum class PriorMode { powers_of_two_prior, uniform_prior };

std::string prior_mode_name(PriorMode m);
PriorMode prior_mode_from_name(const std::string& name);

struct DatasetConfig {
    std::string kind = "synthetic"; // "synthetic" | "csv"
    SyntheticSpec synthetic;
    CsvSpec csv;
};

// Every training knob in one place; the JSON config mirrors this
// field-for-field and unknown keys are rejected.
struct RunConfig {
    NetworkSpec network{{2, 16, 16, 3}, true};
    DatasetConfig dataset;
    std::size_t rounds_T = 9;
    std::size_t epochs_per_round = 3;
    std::size_t pretrain_epochs = 30;
    double learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t batch_size = 128;
    double alpha = 0x1.0p-11;
    double delta0 = 1.0;
    double sigma_cutoff_S = 0.05;
    int precision_b = 8;
    int top_j = 0;
    std::vector<double> schedule = {0.3, 0.5, 0.65, 0.775, 0.875, 0.95, 0.98, 0.99, 1.0};
    std::uint64_t seed = 7;
    PriorMode prior_mode = PriorMode::powers_of_two_prior;
    std::size_t ensemble_samples = 20;

    void validate() const; // throws ConfigError
};

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

// Canonical single-line echo; checkpoints embed this so that equivalent
// configs produce identical bytes regardless of input formatting.
std::string config_echo(const RunConfig& cfg);

RunConfig load_config_file(const std::string& path);

// --set key=value with dotted paths ("dataset.seed=5"). The value is parsed
// as JSON when it parses, otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& keyval);

} // namespace pwfn
