// qpm benchmark harness.
//
//   qpm run --config sweep.conf [--out dir] [--parallel k] [--dry-run]
//   qpm plot --summary summary.csv --out curves.svg
//   qpm selftest
//
// `run` expands the config into (task x variant) experiments, executes them
// (sequentially by default), writes history/summary/manifest files per
// experiment, and prints a final accuracy table. QML_OUT_DIR serves as the
// output directory when --out is absent.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "qpm/qpm.hpp"

namespace {

struct RunOutcome {
    qpm::ExperimentResult result;
    bool ok = false;
    std::string error;
};

void print_dry_run(const qpm::SweepSpec& spec) {
    std::printf("%zu experiment(s):\n", spec.configs.size());
    for (const qpm::ExperimentConfig& cfg : spec.configs) {
        std::string seeds;
        for (const auto s : cfg.seeds) {
            seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
        }
        std::printf(
            "  %-40s qubits=%d depth=%d epochs=%d batch=%d seeds=%s\n",
            qpm::config_id(cfg).c_str(), cfg.n_qubits, cfg.depth, cfg.epochs,
            cfg.batch_size, seeds.c_str());
    }
}

void print_final_table(const std::vector<RunOutcome>& outcomes) {
    std::printf("\n%-18s %-22s %s\n", "task", "variant", "final test acc");
    for (const RunOutcome& o : outcomes) {
        if (!o.ok) {
            continue;
        }
        const auto& r = o.result;
        if (r.stats.empty()) {
            std::printf("%-18s %-22s -\n", qpm::task_slug(r.cfg.task).c_str(),
                        qpm::variant_name(r.cfg.variant));
            continue;
        }
        const auto& last = r.stats.back();
        std::printf("%-18s %-22s %.4f +- %.4f\n",
                    qpm::task_slug(r.cfg.task).c_str(),
                    qpm::variant_name(r.cfg.variant), last.acc_mean,
                    last.acc_std);
    }
}

int command_run(const std::string& config_path, std::string out_dir,
                int parallel, bool dry_run) {
    if (out_dir.empty()) {
        if (const char* env = std::getenv("QML_OUT_DIR")) {
            out_dir = env;
        } else {
            out_dir = ".";
        }
    }
    qpm::SweepSpec spec = qpm::parse_config(config_path);
    if (dry_run) {
        print_dry_run(spec);
        return 0;
    }
    if (spec.configs.empty()) {
        return 0;
    }

    std::vector<RunOutcome> outcomes(spec.configs.size());
    const auto run_one = [&](std::size_t i) {
        RunOutcome& o = outcomes[i];
        try {
            o.result = qpm::run_experiment(spec.configs[i]);
            o.ok = true;
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    };

    if (parallel <= 1) {
        for (std::size_t i = 0; i < spec.configs.size(); ++i) {
            std::printf("[%zu/%zu] %s\n", i + 1, spec.configs.size(),
                        qpm::config_id(spec.configs[i]).c_str());
            std::fflush(stdout);
            run_one(i);
            if (outcomes[i].ok) {
                qpm::write_outputs(outcomes[i].result, out_dir);
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const int k = std::min<int>(parallel,
                                    static_cast<int>(spec.configs.size()));
        for (int w = 0; w < k; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1);
                     i < spec.configs.size(); i = next.fetch_add(1)) {
                    run_one(i);
                }
            });
        }
        for (auto& t : workers) {
            t.join();
        }
        for (std::size_t i = 0; i < spec.configs.size(); ++i) {
            if (outcomes[i].ok) {
                qpm::write_outputs(outcomes[i].result, out_dir);
            }
        }
    }

    int failures = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].ok) {
            ++failures;
            std::fprintf(stderr, "error: %s: %s\n",
                         qpm::config_id(spec.configs[i]).c_str(),
                         outcomes[i].error.c_str());
        }
    }
    print_final_table(outcomes);
    return failures ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational quantum circuits with trainable measurements"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int parallel = 1;
    bool dry_run = false;
    CLI::App* run = app.add_subcommand("run", "execute a benchmark sweep");
    run->add_option("--config", config_path, "sweep configuration file")
        ->required();
    run->add_option("--out", out_dir,
                    "output directory (default: $QML_OUT_DIR or .)");
    run->add_option("--parallel", parallel, "worker thread count")
        ->check(CLI::PositiveNumber);
    run->add_flag("--dry-run", dry_run, "print the expanded sweep and exit");

    std::string summary_path;
    std::string svg_path;
    CLI::App* plot =
        app.add_subcommand("plot", "render learning curves from a summary CSV");
    plot->add_option("--summary", summary_path, "summary CSV path")->required();
    plot->add_option("--out", svg_path, "output SVG path")->required();

    CLI::App* selftest =
        app.add_subcommand("selftest", "run the gradient/invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return command_run(config_path, out_dir, parallel, dry_run);
        }
        if (plot->parsed()) {
            qpm::plot_summary(summary_path, svg_path);
            return 0;
        }
        if (selftest->parsed()) {
            return qpm::run_selftest(std::cout) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
