#include "pwfn/checkpoint.hpp"
#include "pwfn/config.hpp"
#include "pwfn/errors.hpp"
#include "pwfn/metrics.hpp"
#include "pwfn/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using pwfn::Checkpoint;
using pwfn::RunConfig;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config_path, "JSON config file");
    sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", o.overrides, "override config keys, e.g. --set dataset.seed=5");
    sub->add_option("--seed", o.seed, "override the run seed");
}

// Precedence: defaults < config file (or checkpoint echo) < --set < --seed.
RunConfig resolve_config(const CommonOpts& o, const std::string& fallback_echo) {
    nlohmann::json doc = nlohmann::json::object();
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw pwfn::IoError("config: cannot open: " + o.config_path);
        try {
            doc = nlohmann::json::parse(f);
        } catch (const nlohmann::json::exception& e) {
            throw pwfn::ConfigError(std::string("config: parse error: ") + e.what());
        }
    } else if (!fallback_echo.empty()) {
        doc = nlohmann::json::parse(fallback_echo);
    }
    for (const std::string& kv : o.overrides) pwfn::apply_override(doc, kv);
    if (o.seed_given) doc["seed"] = o.seed;
    return pwfn::config_from_json(doc);
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw pwfn::IoError("cannot open for writing: " + path.string());
    f << content;
    if (!f) throw pwfn::IoError("write failed: " + path.string());
}

fs::path out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / name;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw pwfn::IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int cmd_pretrain(const CommonOpts& o) {
    const RunConfig cfg = resolve_config(o, "");
    const Checkpoint ckpt = pwfn::pretrain(cfg);
    const fs::path path = out_path(o, "pretrained.ckpt");
    pwfn::save_checkpoint(path.string(), ckpt);

    nlohmann::ordered_json row;
    row["subcommand"] = "pretrain";
    row["pretrain_train_accuracy"] = ckpt.pretrain_train_accuracy;
    row["pretrain_test_accuracy"] = ckpt.pretrain_test_accuracy;
    row["epochs"] = cfg.pretrain_epochs;
    row["checkpoint"] = path.string();
    std::cout << row.dump() << "\n";
    return 0;
}

int cmd_compress(const CommonOpts& o, const std::string& ckpt_path) {
    const Checkpoint start = pwfn::load_checkpoint(ckpt_path);
    const RunConfig cfg = resolve_config(o, start.config_json);
    const pwfn::CompressArtifacts art = pwfn::compress(start, cfg);

    for (const Checkpoint& c : art.per_round) {
        pwfn::save_checkpoint(
            out_path(o, "round_" + std::to_string(c.rounds_completed) + ".ckpt").string(), c);
    }
    const fs::path final_path = out_path(o, "final.ckpt");
    pwfn::save_checkpoint(final_path.string(), art.final);
    write_text(out_path(o, "report.json"), pwfn::report_to_json(art.report));
    write_text(out_path(o, "clusters.csv"), pwfn::clusters_to_csv(art.report.clusters));
    write_text(out_path(o, "assignments.json"), pwfn::assignments_to_json(art.rounds));
    write_text(out_path(o, "mu_sigma.csv"), pwfn::mu_sigma_csv(art.final.store));

    nlohmann::ordered_json row;
    row["subcommand"] = "compress";
    row["entropy_bits"] = art.report.entropy_bits;
    row["unique_params"] = art.report.unique_params;
    row["top1_point"] = art.report.top1_point;
    row["top1_ensemble"] = art.report.top1_ensemble;
    row["pretrain_test_accuracy"] = art.report.pretrain_test_accuracy;
    row["achieved_omega"] = art.report.achieved_omega;
    row["rounds"] = art.final.rounds_completed;
    row["checkpoint"] = final_path.string();
    std::cout << row.dump() << "\n";
    return 0;
}

int cmd_evaluate(const CommonOpts& o, const std::string& ckpt_path, const std::string& mode,
                 const std::string& split, std::size_t samples) {
    const Checkpoint ckpt = pwfn::load_checkpoint(ckpt_path);
    const RunConfig cfg = resolve_config(o, ckpt.config_json);
    if (cfg.network.layer_dims != ckpt.network.layer_dims) {
        throw pwfn::ConfigError("evaluate: checkpoint network does not match config network");
    }
    const pwfn::TrainTest data = pwfn::build_dataset(cfg);
    const pwfn::Dataset& d = (split == "train") ? data.train : data.test;
    const std::size_t n_samples = (samples > 0) ? samples : cfg.ensemble_samples;

    double accuracy = 0.0;
    if (mode == "point") {
        accuracy = pwfn::evaluate_point(cfg.network, ckpt.store, d);
    } else {
        pwfn::RngState rng = pwfn::RngState::seeded(cfg.seed);
        accuracy = pwfn::evaluate_ensemble(cfg.network, ckpt.store, d, rng, n_samples);
    }

    nlohmann::ordered_json row;
    row["subcommand"] = "evaluate";
    row["mode"] = mode;
    row["split"] = split;
    if (mode == "ensemble") {
        row["samples"] = n_samples;
        row["seed"] = cfg.seed;
    }
    row["accuracy"] = accuracy;
    row["checkpoint"] = ckpt_path;
    const std::string line = row.dump();
    std::cout << line << "\n";

    const fs::path rows = out_path(o, "evaluations.jsonl");
    std::ofstream f(rows, std::ios::app);
    if (!f) throw pwfn::IoError("cannot open for writing: " + rows.string());
    f << line << "\n";
    return 0;
}

int cmd_report(const CommonOpts& o, const std::string& ckpt_path, const std::string& log_path) {
    const Checkpoint ckpt = pwfn::load_checkpoint(ckpt_path);
    const RunConfig cfg = resolve_config(o, ckpt.config_json);
    const pwfn::TrainTest data = pwfn::build_dataset(cfg);

    pwfn::CompressionReport rep;
    rep.entropy_bits = pwfn::weight_entropy(ckpt.store);
    rep.unique_params = pwfn::unique_count(ckpt.store);
    rep.top1_point = pwfn::evaluate_point(cfg.network, ckpt.store, data.test);
    pwfn::RngState rng = pwfn::RngState::seeded(cfg.seed);
    rep.top1_ensemble =
        pwfn::evaluate_ensemble(cfg.network, ckpt.store, data.test, rng, cfg.ensemble_samples);
    rep.pretrain_test_accuracy = ckpt.pretrain_test_accuracy;
    rep.prior_mode = pwfn::prior_mode_name(cfg.prior_mode);
    rep.achieved_omega = ckpt.achieved_omega;
    rep.used_center_count = ckpt.used.ints.size();
    rep.entropy_by_round = ckpt.entropy_by_round;
    rep.fixed_by_round = ckpt.fixed_by_round;
    if (!log_path.empty()) {
        const auto rounds = pwfn::assignments_from_json(read_text(log_path));
        rep.clusters = pwfn::relative_distance_report(rounds);
        write_text(out_path(o, "clusters.csv"), pwfn::clusters_to_csv(rep.clusters));
    }
    write_text(out_path(o, "report.json"), pwfn::report_to_json(rep));
    write_text(out_path(o, "mu_sigma.csv"), pwfn::mu_sigma_csv(ckpt.store));
    write_text(out_path(o, "sigma_hist.csv"), pwfn::sigma_histogram_csv(ckpt.store));

    nlohmann::ordered_json row;
    row["subcommand"] = "report";
    row["entropy_bits"] = rep.entropy_bits;
    row["unique_params"] = rep.unique_params;
    row["top1_point"] = rep.top1_point;
    row["top1_ensemble"] = rep.top1_ensemble;
    row["out"] = o.out_dir;
    std::cout << row.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"probabilistic weight-fixing: train, compress, evaluate"};
    app.require_subcommand(1);

    CommonOpts pre_o, com_o, eva_o, rep_o;
    std::string com_ckpt, eva_ckpt, rep_ckpt, rep_log;
    std::string eva_mode = "point", eva_split = "test";
    std::size_t eva_samples = 0;

    CLI::App* pre = app.add_subcommand("pretrain", "train the point network");
    add_common(pre, pre_o);

    CLI::App* com = app.add_subcommand("compress", "run the fixing rounds");
    add_common(com, com_o);
    com->add_option("--checkpoint", com_ckpt, "pretrained or mid-run checkpoint")->required();

    CLI::App* eva = app.add_subcommand("evaluate", "accuracy of a checkpoint");
    add_common(eva, eva_o);
    eva->add_option("--checkpoint", eva_ckpt, "checkpoint to evaluate")->required();
    eva->add_option("--mode", eva_mode, "point or ensemble")
        ->check(CLI::IsMember({"point", "ensemble"}))
        ->capture_default_str();
    eva->add_option("--split", eva_split, "train or test")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();
    eva->add_option("--samples", eva_samples, "ensemble sample count (0 = config value)");

    CLI::App* rep = app.add_subcommand("report", "entropy, clusters, scatter exports");
    add_common(rep, rep_o);
    rep->add_option("--checkpoint", rep_ckpt, "checkpoint to report on")->required();
    rep->add_option("--log", rep_log, "assignments.json from compress");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    pre_o.seed_given = pre->count("--seed") > 0;
    com_o.seed_given = com->count("--seed") > 0;
    eva_o.seed_given = eva->count("--seed") > 0;
    rep_o.seed_given = rep->count("--seed") > 0;

    try {
        if (pre->parsed()) return cmd_pretrain(pre_o);
        if (com->parsed()) return cmd_compress(com_o, com_ckpt);
        if (eva->parsed()) return cmd_evaluate(eva_o, eva_ckpt, eva_mode, eva_split, eva_samples);
        if (rep->parsed()) return cmd_report(rep_o, rep_ckpt, rep_log);
    } catch (const pwfn::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pwfn::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pwfn::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pwfn::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
