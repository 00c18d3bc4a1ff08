// experiment.hpp
// Benchmark protocol: generate 300 samples, split 200/100, standardize on the
// train split, then train each variant for 40 epochs of 10 batches x 20 with
// per-epoch reshuffling, recording mean train loss and test accuracy. Repeated
// over seeds and aggregated as mean +/- sample std. CSV/JSON writers keep all
// floats at 17 significant digits so reruns are byte-identical.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpm/data.hpp"
#include "qpm/models.hpp"
#include "qpm/prng.hpp"

namespace qpm {

struct TaskSpec {
    std::string family = "moons"; // moons | circles | blobs
    double noise = 0.1;           // moons, circles
    double factor = 0.5;          // circles
    double class_sep = 1.0;       // blobs
    int d = 2;                    // feature dimension (blobs; 2 otherwise)
};

inline std::string task_slug(const TaskSpec& t) {
    char buf[64];
    if (t.family == "blobs") {
        std::snprintf(buf, sizeof(buf), "blobs_d%d", t.d);
    } else {
        std::snprintf(buf, sizeof(buf), "%s_noise%g", t.family.c_str(),
                      t.noise);
    }
    return buf;
}

struct ExperimentConfig {
    TaskSpec task;
    VariantKind variant = VariantKind::VQC;
    int n_qubits = 4;
    int depth = 2;
    int epochs = 40;
    int batch_size = 20;
    int n_train = 200;
    int n_test = 100;
    int latent_dim = 16;
    double lr_theta = 0.01;
    double lr_obs = 0.1;
    double lr_ctrl = 0.01;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::string out_dir = ".";
};

inline std::string config_id(const ExperimentConfig& cfg) {
    return task_slug(cfg.task) + "__" + variant_name(cfg.variant);
}

inline void validate_config(const ExperimentConfig& cfg) {
    const auto fail = [](const std::string& msg) {
        throw std::invalid_argument("config: " + msg);
    };
    if (cfg.task.family != "moons" && cfg.task.family != "circles" &&
        cfg.task.family != "blobs") {
        fail("unknown task family '" + cfg.task.family + "'");
    }
    if (cfg.n_qubits < 1 || cfg.n_qubits > kMaxQubits) {
        fail("n_qubits out of range");
    }
    if (cfg.depth < 1) {
        fail("depth must be >= 1");
    }
    if (cfg.epochs < 0) {
        fail("epochs must be >= 0");
    }
    if (cfg.batch_size < 1 || cfg.n_train % cfg.batch_size != 0) {
        fail("batch_size must divide n_train");
    }
    if (cfg.n_train < 1 || cfg.n_test < 1) {
        fail("n_train and n_test must be positive");
    }
    if ((cfg.n_train + cfg.n_test) % 2 != 0) {
        fail("n_train + n_test must be even (balanced generators)");
    }
    if (cfg.task.family == "blobs" && cfg.task.d < 2) {
        fail("blobs need d >= 2");
    }
    if (cfg.task.family != "blobs" && cfg.task.noise < 0) {
        fail("noise must be >= 0");
    }
    if (cfg.task.family == "circles" &&
        !(cfg.task.factor > 0 && cfg.task.factor < 1)) {
        fail("circles factor must be in (0, 1)");
    }
    if (cfg.seeds.empty()) {
        fail("at least one seed required");
    }
    if (cfg.latent_dim < 1) {
        fail("latent_dim must be >= 1");
    }
}

struct RunHistory {
    std::uint64_t seed = 0;
    std::vector<double> train_loss; // one entry per epoch
    std::vector<double> test_acc;
    double wall_seconds = 0; // not written to CSV (would break determinism)
};

template <typename Scalar>
double evaluate(const ModelVariant<Scalar>& model, const Dataset<Scalar>& test) {
    if (test.size() == 0) {
        throw std::invalid_argument("evaluate: empty test set");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto [p, cache] = model_forward(model, test.features[i]);
        const int predicted = p >= Scalar{0.5} ? 1 : 0;
        correct += predicted == test.labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

namespace detail {

inline Dataset<double> generate_task(const TaskSpec& task, int n, Prng& rng) {
    if (task.family == "moons") {
        return make_moons<double>(n, task.noise, rng);
    }
    if (task.family == "circles") {
        return make_circles<double>(n, task.noise, task.factor, rng);
    }
    return make_blob_classification<double>(n, task.d, task.class_sep, rng);
}

} // namespace detail

inline RunHistory train_one_seed(const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    Prng data_rng(seed, kStreamData);
    Prng model_rng(seed, kStreamModel);
    Prng shuffle_rng(seed, kStreamShuffle);

    Dataset<double> full =
        detail::generate_task(cfg.task, cfg.n_train + cfg.n_test, data_rng);
    full.seed = seed;
    SplitData<double> split =
        split_and_standardize(full, cfg.n_train, cfg.n_test, data_rng);

    AnsatzConfig ansatz{cfg.n_qubits, cfg.depth};
    ModelVariant<double> model =
        make_model<double>(cfg.variant, ansatz, cfg.task.d, model_rng,
                           cfg.latent_dim, cfg.lr_theta, cfg.lr_obs,
                           cfg.lr_ctrl);

    RunHistory history;
    history.seed = seed;
    history.train_loss.reserve(cfg.epochs);
    history.test_acc.reserve(cfg.epochs);

    std::vector<std::size_t> order(cfg.n_train);
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    const int n_batches = cfg.n_train / cfg.batch_size;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0;
        for (int b = 0; b < n_batches; ++b) {
            GradientSet<double> batch_grads;
            for (int k = 0; k < cfg.batch_size; ++k) {
                const std::size_t idx = order[b * cfg.batch_size + k];
                const auto [p, cache] =
                    model_forward(model, split.train.features[idx]);
                const int y = split.train.labels[idx];
                loss_sum += bce_loss(p, y).loss;
                model_backward_into(model, cache, y, batch_grads);
            }
            model_step(model, std::move(batch_grads), cfg.batch_size);
        }
        history.train_loss.push_back(loss_sum / cfg.n_train);
        history.test_acc.push_back(evaluate(model, split.test));
    }
    history.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return history;
}

struct EpochStats {
    double loss_mean = 0;
    double loss_std = 0;
    double acc_mean = 0;
    double acc_std = 0;
};

struct ExperimentResult {
    ExperimentConfig cfg;
    std::vector<RunHistory> histories; // one per seed, in cfg.seeds order
    std::vector<EpochStats> stats;     // one per epoch
};

namespace detail {

inline std::pair<double, double> mean_and_sample_std(
    const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0;
    for (const double v : values) {
        mean += v;
    }
    mean /= n;
    if (values.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0;
    for (const double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1))};
}

} // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentResult result;
    result.cfg = cfg;
    for (const std::uint64_t seed : cfg.seeds) {
        result.histories.push_back(train_one_seed(cfg, seed));
    }
    result.stats.resize(cfg.epochs);
    std::vector<double> losses(cfg.seeds.size());
    std::vector<double> accs(cfg.seeds.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            losses[s] = result.histories[s].train_loss[epoch];
            accs[s] = result.histories[s].test_acc[epoch];
        }
        auto [lm, ls] = detail::mean_and_sample_std(losses);
        auto [am, as] = detail::mean_and_sample_std(accs);
        result.stats[epoch] = {lm, ls, am, as};
    }
    return result;
}

// history_<id>.csv: variant,task,seed,epoch,train_loss,test_acc
inline void write_history_csv(const ExperimentResult& r, std::ostream& os) {
    os << "variant,task,seed,epoch,train_loss,test_acc\n";
    const std::string variant = variant_name(r.cfg.variant);
    const std::string task = task_slug(r.cfg.task);
    for (const RunHistory& h : r.histories) {
        for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
            os << variant << ',' << task << ',' << h.seed << ',' << e + 1
               << ',' << detail::format_g17(h.train_loss[e]) << ','
               << detail::format_g17(h.test_acc[e]) << '\n';
        }
    }
}

// summary_<id>.csv: variant,task,epoch,loss_mean,loss_std,acc_mean,acc_std
inline void write_summary_csv(const ExperimentResult& r, std::ostream& os) {
    os << "variant,task,epoch,loss_mean,loss_std,acc_mean,acc_std\n";
    const std::string variant = variant_name(r.cfg.variant);
    const std::string task = task_slug(r.cfg.task);
    for (std::size_t e = 0; e < r.stats.size(); ++e) {
        const EpochStats& s = r.stats[e];
        os << variant << ',' << task << ',' << e + 1 << ','
           << detail::format_g17(s.loss_mean) << ','
           << detail::format_g17(s.loss_std) << ','
           << detail::format_g17(s.acc_mean) << ','
           << detail::format_g17(s.acc_std) << '\n';
    }
}

// manifest_<id>.json: the fully resolved config that produced the run.
inline void write_manifest_json(const ExperimentConfig& cfg, std::ostream& os) {
    nlohmann::json j;
    j["config_id"] = config_id(cfg);
    j["task"] = {{"family", cfg.task.family},
                 {"noise", cfg.task.noise},
                 {"factor", cfg.task.factor},
                 {"class_sep", cfg.task.class_sep},
                 {"d", cfg.task.d}};
    j["variant"] = variant_name(cfg.variant);
    j["n_qubits"] = cfg.n_qubits;
    j["depth"] = cfg.depth;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["n_train"] = cfg.n_train;
    j["n_test"] = cfg.n_test;
    j["latent_dim"] = cfg.latent_dim;
    j["lr_theta"] = cfg.lr_theta;
    j["lr_obs"] = cfg.lr_obs;
    j["lr_ctrl"] = cfg.lr_ctrl;
    j["seeds"] = cfg.seeds;
    os << j.dump(2) << '\n';
}

// Writes history/summary/manifest for one result into dir, returning the
// paths written.
inline std::vector<std::string> write_outputs(const ExperimentResult& r,
                                              const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string id = config_id(r.cfg);
    std::vector<std::string> paths;
    const auto open = [&](const std::string& name) {
        const std::string path = (fs::path(dir) / name).string();
        paths.push_back(path);
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path);
        }
        return out;
    };
    {
        auto out = open("history_" + id + ".csv");
        write_history_csv(r, out);
    }
    {
        auto out = open("summary_" + id + ".csv");
        write_summary_csv(r, out);
    }
    {
        auto out = open("manifest_" + id + ".json");
        write_manifest_json(r.cfg, out);
    }
    return paths;
}

} // namespace qpm
