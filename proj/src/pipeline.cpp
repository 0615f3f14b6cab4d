#include "pwfn/pipeline.hpp"
#include "pwfn/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwfn {

namespace {

struct BatchRange {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Sequential batches in dataset order, last one partial.
std::vector<BatchRange> batch_ranges(std::size_t n, std::size_t batch_size) {
    std::vector<BatchRange> out;
    for (std::size_t b = 0; b < n; b += batch_size) {
        out.push_back({b, std::min(n, b + batch_size)});
    }
    return out;
}

Matrix slice_rows(const Matrix& x, const BatchRange& r) {
    Matrix out(r.end - r.begin, x.cols);
    std::copy(x.data.begin() + static_cast<std::ptrdiff_t>(r.begin * x.cols),
              x.data.begin() + static_cast<std::ptrdiff_t>(r.end * x.cols), out.data.begin());
    return out;
}

std::vector<int> slice_labels(const std::vector<int>& y, const BatchRange& r) {
    return std::vector<int>(y.begin() + static_cast<std::ptrdiff_t>(r.begin),
                            y.begin() + static_cast<std::ptrdiff_t>(r.end));
}

std::vector<const double*> mu_pointers(const WeightStore& store) {
    std::vector<const double*> p;
    p.reserve(store.tensors.size());
    for (const auto& t : store.tensors) p.push_back(t.mu.data());
    return p;
}

void check_dataset_dims(const NetworkSpec& spec, const TrainTest& data) {
    if (data.train.x.cols != spec.layer_dims.front() ||
        data.test.x.cols != spec.layer_dims.front()) {
        throw ConfigError("dataset: feature count does not match network input dim");
    }
    const std::size_t out_dim = spec.layer_dims.back();
    for (const auto* split : {&data.train, &data.test}) {
        for (int label : split->y) {
            if (label < 0 || static_cast<std::size_t>(label) >= out_dim) {
                throw ConfigError("dataset: label outside network output range");
            }
        }
    }
}

Checkpoint make_checkpoint(const NetworkSpec& spec, const WeightStore& store,
                           const RunConfig& cfg, const RngState& rng, std::string phase,
                           std::size_t rounds_completed) {
    Checkpoint c;
    c.network = spec;
    c.store = store;
    c.base = BaseSetConfig{cfg.precision_b, cfg.top_j};
    c.rng = rng;
    c.phase = std::move(phase);
    c.rounds_completed = rounds_completed;
    c.config_json = config_echo(cfg);
    return c;
}

} // namespace

TrainTest build_dataset(const RunConfig& cfg) {
    TrainTest data;
    if (cfg.dataset.kind == "synthetic") {
        data = make_blobs(cfg.dataset.synthetic);
    } else {
        data = load_csv(cfg.dataset.csv);
    }
    check_dataset_dims(cfg.network, data);
    return data;
}

void init_point_weights(const NetworkSpec& spec, WeightStore& store, RngState& rng) {
    for (std::size_t ti = 0; ti < store.tensors.size(); ++ti) {
        auto& t = store.tensors[ti];
        std::fill(t.sigma.begin(), t.sigma.end(), 0.0);
        if (spec.tensor_is_bias(ti)) {
            std::fill(t.mu.begin(), t.mu.end(), 0.0);
            continue;
        }
        const double std_dev = std::sqrt(1.0 / static_cast<double>(t.rows + t.cols));
        rng.fill_gaussian(t.mu.data(), t.mu.size());
        for (double& m : t.mu) m *= std_dev;
    }
}

void init_sigma_prior(WeightStore& store, const RunConfig& cfg) {
    if (cfg.prior_mode == PriorMode::uniform_prior) {
        const double s = cfg.sigma_cutoff_S / 2.0;
        for (auto& t : store.tensors) std::fill(t.sigma.begin(), t.sigma.end(), s);
        return;
    }
    init_prior_sigma(store);
}

void train_point_epoch(const NetworkSpec& spec, WeightStore& store, SgdState& opt,
                       const Dataset& train, std::size_t batch_size) {
    const auto params = mu_pointers(store);
    for (const BatchRange& r : batch_ranges(train.x.rows, batch_size)) {
        const Matrix xb = slice_rows(train.x, r);
        const std::vector<int> yb = slice_labels(train.y, r);
        ForwardCache cache;
        const Matrix logits = network_forward(spec, params, xb, &cache);
        const CeResult ce = softmax_cross_entropy(logits, yb);
        if (!std::isfinite(ce.loss)) throw NumericError("pretrain: non-finite loss");
        const auto grads = network_backward(spec, params, cache, ce.grad_logits);
        for (std::size_t ti = 0; ti < store.tensors.size(); ++ti) {
            auto& t = store.tensors[ti];
            opt.step(ti, t.mu.data(), grads[ti].data(), t.mu.size());
        }
    }
}

void train_epoch(const NetworkSpec& spec, WeightStore& store, SgdState& opt, RngState& rng,
                 const Dataset& train, const RegConfig& reg, std::size_t batch_size) {
    for (const BatchRange& r : batch_ranges(train.x.rows, batch_size)) {
        const SampleResult sample = sample_weights(store, rng);
        std::vector<const double*> params;
        params.reserve(sample.weights.size());
        for (const auto& w : sample.weights) params.push_back(w.data());

        const Matrix xb = slice_rows(train.x, r);
        const std::vector<int> yb = slice_labels(train.y, r);
        ForwardCache cache;
        const Matrix logits = network_forward(spec, params, xb, &cache);
        const CeResult ce = softmax_cross_entropy(logits, yb);
        const double loss = training_loss(ce.loss, store, reg);
        if (!std::isfinite(loss)) throw NumericError("train: non-finite loss");

        const auto grad_w = network_backward(spec, params, cache, ce.grad_logits);
        const GradientPair gp = assemble_gradients(store, reg, grad_w, sample.epsilon);
        for (std::size_t ti = 0; ti < store.tensors.size(); ++ti) {
            auto& t = store.tensors[ti];
            opt.step(2 * ti, t.mu.data(), gp.mu[ti].data(), t.mu.size());
            opt.step(2 * ti + 1, t.sigma.data(), gp.sigma[ti].data(), t.sigma.size());
            for (std::size_t i = 0; i < t.sigma.size(); ++i) {
                if (!t.fixed[i] && t.sigma[i] < kSigmaFloor) t.sigma[i] = kSigmaFloor;
            }
        }
    }
}

SgdState make_point_optimizer(const NetworkSpec& spec, const RunConfig& cfg) {
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < spec.tensor_count(); ++i) sizes.push_back(spec.tensor_size(i));
    return SgdState::init(sizes, cfg.learning_rate, cfg.momentum);
}

SgdState make_bayes_optimizer(const NetworkSpec& spec, const RunConfig& cfg) {
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < spec.tensor_count(); ++i) {
        sizes.push_back(spec.tensor_size(i)); // mu
        sizes.push_back(spec.tensor_size(i)); // sigma
    }
    return SgdState::init(sizes, cfg.learning_rate, cfg.momentum);
}

Checkpoint pretrain(const RunConfig& cfg) {
    cfg.validate();
    const NetworkSpec& spec = cfg.network;
    const TrainTest data = build_dataset(cfg);

    WeightStore store = WeightStore::from_spec(spec);
    RngState rng = RngState::seeded(cfg.seed);
    init_point_weights(spec, store, rng);

    SgdState opt = make_point_optimizer(spec, cfg);
    for (std::size_t e = 0; e < cfg.pretrain_epochs; ++e) {
        train_point_epoch(spec, store, opt, data.train, cfg.batch_size);
    }
    snap_store_to_float32(store);

    Checkpoint ckpt = make_checkpoint(spec, store, cfg, rng, "pretrained", 0);
    ckpt.pretrain_train_accuracy = evaluate_point(spec, store, data.train);
    ckpt.pretrain_test_accuracy = evaluate_point(spec, store, data.test);
    return ckpt;
}

CompressArtifacts compress(const Checkpoint& start, const RunConfig& cfg) {
    cfg.validate();
    const NetworkSpec& spec = cfg.network;
    if (spec.layer_dims != start.network.layer_dims ||
        spec.bias_included != start.network.bias_included) {
        throw ConfigError("compress: checkpoint network does not match config network");
    }
    if (start.phase != "pretrained" && start.phase != "compress") {
        throw ConfigError("compress: checkpoint phase must be pretrained or compress");
    }
    const BaseSetConfig base{cfg.precision_b, cfg.top_j};
    if (start.phase == "compress" &&
        (start.base.precision_b != base.precision_b || start.base.top_j != base.top_j)) {
        throw ConfigError("compress: checkpoint codebook does not match config");
    }

    FixingSchedule sched{cfg.schedule, cfg.epochs_per_round};
    sched.validate();
    const std::size_t start_round = (start.phase == "pretrained") ? 0 : start.rounds_completed;
    if (start_round >= sched.rounds()) {
        throw ConfigError("compress: checkpoint already past the final round");
    }

    const TrainTest data = build_dataset(cfg);

    WeightStore store = start.store;
    RngState rng = start.rng;
    UsedCenters used = start.used;
    int achieved = start.achieved_omega;
    std::vector<double> entropy_by_round = start.entropy_by_round;
    std::vector<std::size_t> fixed_by_round = start.fixed_by_round;

    if (start.phase == "pretrained") {
        init_sigma_prior(store, cfg);
    }

    const RegConfig reg{cfg.alpha, cfg.sigma_cutoff_S};
    CompressArtifacts art;

    for (std::size_t t = start_round; t < sched.rounds(); ++t) {
        SgdState opt = make_bayes_optimizer(spec, cfg);
        for (std::size_t e = 0; e < sched.epochs_per_round; ++e) {
            train_epoch(spec, store, opt, rng, data.train, reg, cfg.batch_size);
        }
        RoundState rs =
            fix_round(store, t + 1, sched.fractions[t], base, cfg.delta0, used);
        achieved = std::max(achieved, rs.max_omega_assigned);
        snap_store_to_float32(store);
        entropy_by_round.push_back(weight_entropy(store));
        fixed_by_round.push_back(store.fixed_count());
        art.rounds.push_back(std::move(rs));

        const bool last = (t + 1 == sched.rounds());
        Checkpoint c = make_checkpoint(spec, store, cfg, rng, last ? "final" : "compress", t + 1);
        c.achieved_omega = achieved;
        c.used = used;
        c.pretrain_train_accuracy = start.pretrain_train_accuracy;
        c.pretrain_test_accuracy = start.pretrain_test_accuracy;
        c.entropy_by_round = entropy_by_round;
        c.fixed_by_round = fixed_by_round;
        art.per_round.push_back(std::move(c));
    }

    art.final = art.per_round.back();
    if (art.final.store.fixed_count() != art.final.store.total()) {
        throw NumericError("compress: final round left free weights");
    }

    CompressionReport rep;
    rep.entropy_bits = weight_entropy(art.final.store);
    rep.unique_params = unique_count(art.final.store);
    rep.top1_point = evaluate_point(spec, art.final.store, data.test);
    RngState eval_rng = RngState::seeded(cfg.seed);
    rep.top1_ensemble =
        evaluate_ensemble(spec, art.final.store, data.test, eval_rng, cfg.ensemble_samples);
    rep.pretrain_test_accuracy = art.final.pretrain_test_accuracy;
    rep.prior_mode = prior_mode_name(cfg.prior_mode);
    rep.achieved_omega = achieved;
    rep.used_center_count = used.ints.size();
    rep.entropy_by_round = entropy_by_round;
    rep.fixed_by_round = fixed_by_round;
    rep.clusters = relative_distance_report(art.rounds);
    art.report = std::move(rep);
    return art;
}

std::string assignments_to_json(const std::vector<RoundState>& rounds) {
    nlohmann::ordered_json doc;
    auto arr = nlohmann::ordered_json::array();
    for (const RoundState& rs : rounds) {
        nlohmann::ordered_json r;
        r["round"] = rs.round_t;
        r["target"] = rs.target;
        r["passes"] = rs.passes_total;
        r["max_omega"] = rs.max_omega_assigned;
        auto as = nlohmann::ordered_json::array();
        for (const AssignmentRecord& rec : rs.assignments) {
            nlohmann::ordered_json a;
            a["omega"] = rec.omega;
            a["delta"] = rec.delta;
            a["center_int"] = rec.center_int;
            a["center"] = rec.center;
            a["cluster_index"] = rec.cluster_index;
            a["member_std"] = rec.member_std;
            a["members"] = rec.members;
            a["member_pre_mu"] = rec.member_pre_mu;
            as.push_back(std::move(a));
        }
        r["assignments"] = std::move(as);
        arr.push_back(std::move(r));
    }
    doc["rounds"] = std::move(arr);
    return doc.dump(2) + "\n";
}

std::vector<RoundState> assignments_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("assignments: parse error: ") + e.what());
    }
    std::vector<RoundState> rounds;
    try {
        for (const auto& r : doc.at("rounds")) {
            RoundState rs;
            rs.round_t = r.at("round").get<std::size_t>();
            rs.target = r.at("target").get<std::size_t>();
            rs.passes_total = r.at("passes").get<std::size_t>();
            rs.max_omega_assigned = r.at("max_omega").get<int>();
            for (const auto& a : r.at("assignments")) {
                AssignmentRecord rec;
                rec.omega = a.at("omega").get<int>();
                rec.delta = a.at("delta").get<double>();
                rec.center_int = a.at("center_int").get<std::int64_t>();
                rec.center = a.at("center").get<double>();
                rec.cluster_index = a.at("cluster_index").get<std::uint32_t>();
                rec.member_std = a.at("member_std").get<double>();
                rec.members = a.at("members").get<std::vector<std::size_t>>();
                rec.member_pre_mu = a.at("member_pre_mu").get<std::vector<double>>();
                rs.assignments.push_back(std::move(rec));
            }
            rounds.push_back(std::move(rs));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("assignments: field error: ") + e.what());
    }
    return rounds;
}

std::string mu_sigma_csv(const WeightStore& store) {
    std::ostringstream out;
    out.precision(17);
    out << "index,tensor,mu,sigma,fixed,cluster_index\n";
    std::size_t idx = 0;
    for (const auto& t : store.tensors) {
        for (std::size_t i = 0; i < t.size(); ++i, ++idx) {
            out << idx << ',' << t.name << ',' << t.mu[i] << ',' << t.sigma[i] << ','
                << int(t.fixed[i]) << ',';
            if (t.cluster[i] != kNoCluster) out << t.cluster[i];
            out << '\n';
        }
    }
    return out.str();
}

std::string sigma_histogram_csv(const WeightStore& store, std::size_t bins) {
    if (bins == 0) throw ConfigError("histogram: bins must be >= 1");
    std::vector<double> sigmas;
    for (const auto& t : store.tensors) {
        sigmas.insert(sigmas.end(), t.sigma.begin(), t.sigma.end());
    }
    std::ostringstream out;
    out.precision(17);
    out << "bin_lo,bin_hi,count\n";
    if (sigmas.empty()) return out.str();
    const auto [lo_it, hi_it] = std::minmax_element(sigmas.begin(), sigmas.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi > lo) ? (hi - lo) / static_cast<double>(bins) : 1.0;
    std::vector<std::size_t> counts(bins, 0);
    for (double s : sigmas) {
        std::size_t b = static_cast<std::size_t>((s - lo) / width);
        if (b >= bins) b = bins - 1;
        ++counts[b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
        out << (lo + width * static_cast<double>(b)) << ','
            << (lo + width * static_cast<double>(b + 1)) << ',' << counts[b] << '\n';
    }
    return out.str();
}

} // namespace pwfn
