// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "nrcba/harness.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    int parallel = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", opts.seed, "override master_seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--parallel", opts.parallel, "worker threads (0 = auto)");
}

nrcba::ExperimentConfig load(const CommonOpts& opts) {
    nrcba::ExperimentConfig cfg = nrcba::parse_config_file(opts.config_path);
    if (opts.seed_set) {
        cfg.master_seed = opts.seed;
        cfg.fed.master_seed = opts.seed;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"5G NR codebook adaptation experiment runner"};
    app.require_subcommand(1);

    CommonOpts dataset_opts, train_opts, eval_opts, sweep_opts;
    std::string data_dir, checkpoint_dir;
    bool per_point = false;

    CLI::App* dataset = app.add_subcommand("dataset", "generate labeled indicator datasets");
    add_common(dataset, dataset_opts);

    CLI::App* train = app.add_subcommand("train", "federated ESN training plus baselines");
    add_common(train, train_opts);
    train->add_option("--data", data_dir, "dataset directory (default: --out)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "policy comparison on fresh seeds");
    add_common(evaluate, eval_opts);
    evaluate->add_option("--checkpoint", checkpoint_dir, "checkpoint directory (default: --out)");

    CLI::App* sweep = app.add_subcommand("sweep", "dataset + train + evaluate across the SNR grid");
    add_common(sweep, sweep_opts);
    sweep->add_flag("--per-point", per_point, "retrain per SNR grid point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dataset->parsed()) {
            nrcba::cmd_dataset(load(dataset_opts), dataset_opts.out_dir, dataset_opts.parallel);
            std::printf("dataset written to %s\n", dataset_opts.out_dir.c_str());
        } else if (train->parsed()) {
            nrcba::cmd_train(load(train_opts), data_dir.empty() ? train_opts.out_dir : data_dir,
                             train_opts.out_dir, train_opts.parallel);
            std::printf("checkpoint written to %s\n", train_opts.out_dir.c_str());
        } else if (evaluate->parsed()) {
            nrcba::cmd_evaluate(load(eval_opts),
                                checkpoint_dir.empty() ? eval_opts.out_dir : checkpoint_dir,
                                eval_opts.out_dir, eval_opts.parallel);
            std::printf("results written to %s\n", eval_opts.out_dir.c_str());
        } else if (sweep->parsed()) {
            nrcba::cmd_sweep(load(sweep_opts), sweep_opts.out_dir, sweep_opts.parallel, per_point);
            std::printf("sweep written to %s\n", sweep_opts.out_dir.c_str());
        }
    } catch (const nrcba::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const nrcba::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
