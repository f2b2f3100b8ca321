// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nrcba/baselines.hpp"
#include "nrcba/harness.hpp"
#include "nrcba/rng.hpp"

namespace nrcba {

namespace fs = std::filesystem;

namespace {

std::string hex64(uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double noise_var_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

struct CsvFile {
    std::ofstream out;

    CsvFile(const std::string& path, uint64_t manifest_hash, const std::string& header)
        : out(path, std::ios::binary) {
        if (!out) throw IoError("cannot open for writing: " + path);
        out << "# manifest: " << hex64(manifest_hash) << "\n" << header << "\n";
    }

    void row(const std::string& line) { out << line << "\n"; }
};

void write_run_manifest(const std::string& path, const std::string& command,
                        const ExperimentConfig& cfg, const std::vector<std::string>& outputs) {
    nlohmann::json j{{"command", command},
                     {"config_hash", hex64(config_hash(cfg))},
                     {"schema_hash", hex64(schema_hash(cfg))},
                     {"master_seed", cfg.master_seed},
                     {"config", canonical_config_text(cfg)},
                     {"outputs", outputs}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

const Scenario& pick_scenario(const std::vector<Scenario>& scenarios, double u) {
    double acc = 0.0;
    for (const auto& s : scenarios) {
        acc += s.weight;
        if (u < acc) return s;
    }
    return scenarios.back();
}

std::string dataset_path(const std::string& dir, int ue) {
    return dir + "/dataset_ue" + std::to_string(ue) + ".csv";
}

}  // namespace

GeneratedSample generate_sample(const ExperimentConfig& cfg, const DftBeamGrid& grid,
                                const Scenario& scenario, double snr_db, uint64_t seed) {
    const ArrayGeometry geom{cfg.cb.n1, cfg.cb.n2};
    GeneratedSample gs;
    gs.snr_db = snr_db;
    gs.noise_var = noise_var_from_snr_db(snr_db);
    gs.profile = make_profile(scenario.kind, scenario.speed_mps, scenario.delay_spread_s,
                              seed_mix(seed, {0xF1u}));
    const ChannelRealization h0 =
        realize(gs.profile, cfg.n_rb, cfg.n_ue_antennas, geom, 0.0, seed_mix(seed, {0xC4u}));

    for (int t = 0; t < cfg.sequence_len; ++t) {
        ChannelRealization h_t =
            t == 0 ? h0 : evolve(h0, gs.profile, geom, t * cfg.csi_period_s);
        LabeledDecision d = label_sample_full(h_t, grid, cfg.cb, cfg.util, gs.noise_var);
        gs.labeled.sequence.push_back(assemble(h_t, grid, cfg.cb, d.pmi_type2, d.metrics_type1,
                                               d.metrics_type2, scenario.speed_mps, snr_db));
        if (t == cfg.sequence_len - 1) {
            gs.labeled.label = static_cast<int>(d.report.choice);
            gs.last = std::move(d);
            gs.h_csi = std::move(h_t);
        }
    }
    return gs;
}

void cmd_dataset(const ExperimentConfig& cfg, const std::string& out_dir, int parallel) {
    cfg.validate();
    fs::create_directories(out_dir);
    const DftBeamGrid grid = build_beam_grid(cfg.cb);
    const std::vector<Scenario> scenarios = training_scenarios(cfg);
    const IndicatorSchema schema = make_schema(cfg.cb);
    const uint64_t sc_hash = schema_hash(cfg);

    const int n_ues = cfg.fed.n_ues;
    const size_t per_ue = static_cast<size_t>(cfg.samples_per_ue);
    const size_t n_val = static_cast<size_t>(cfg.val_samples_per_ue) * static_cast<size_t>(n_ues);
    const size_t n_train = per_ue * static_cast<size_t>(n_ues);

    std::vector<LabeledSample> all(n_train + n_val);
    parallel_for(n_train + n_val, parallel, [&](size_t item) {
        const bool is_val = item >= n_train;
        const uint64_t tag = is_val ? 0x7A11DA7Eu : 0xDA7A5E7u;
        const size_t local = is_val ? item - n_train : item;
        const int ue = is_val ? -1 : static_cast<int>(local / per_ue);
        const uint64_t item_seed =
            seed_mix(cfg.master_seed, {tag, static_cast<uint64_t>(ue + 1), local});
        Rng pick(item_seed);
        const Scenario& sc = (!is_val && cfg.ue_scenario_mode == "partition")
                                 ? scenarios[static_cast<size_t>(ue) % scenarios.size()]
                                 : pick_scenario(scenarios, pick.uniform());
        const double snr = cfg.snr_grid_db[pick.below(cfg.snr_grid_db.size())];
        all[item] =
            generate_sample(cfg, grid, sc, snr, seed_mix(item_seed, {0x5EEDu})).labeled;
    });

    std::vector<std::string> outputs;
    for (int ue = 0; ue < n_ues; ++ue) {
        DatasetMeta meta;
        meta.t_steps = cfg.sequence_len;
        meta.dim = schema.total_dim();
        meta.config_hash = sc_hash;
        meta.seed = cfg.master_seed;
        meta.count = per_ue;
        std::vector<LabeledSample> ue_samples(
            all.begin() + static_cast<long>(per_ue) * ue,
            all.begin() + static_cast<long>(per_ue) * (ue + 1));
        const std::string path = dataset_path(out_dir, ue);
        write_dataset_csv(path, ue_samples, meta);
        write_dataset_meta(path + ".json", meta);
        outputs.push_back(path);
    }
    DatasetMeta vmeta;
    vmeta.t_steps = cfg.sequence_len;
    vmeta.dim = schema.total_dim();
    vmeta.config_hash = sc_hash;
    vmeta.seed = cfg.master_seed;
    vmeta.count = n_val;
    std::vector<LabeledSample> val(all.begin() + static_cast<long>(n_train), all.end());
    const std::string vpath = out_dir + "/dataset_val.csv";
    write_dataset_csv(vpath, val, vmeta);
    write_dataset_meta(vpath + ".json", vmeta);
    outputs.push_back(vpath);

    write_run_manifest(out_dir + "/dataset_manifest.json", "dataset", cfg, outputs);
}

namespace {

FedData load_fed_data(const ExperimentConfig& cfg, const std::string& data_dir) {
    FedData data;
    const uint64_t expect = schema_hash(cfg);
    for (int ue = 0; ue < cfg.fed.n_ues; ++ue) {
        auto [samples, meta] = read_dataset_csv(dataset_path(data_dir, ue));
        if (meta.config_hash != expect)
            throw SchemaMismatchError("dataset " + dataset_path(data_dir, ue) +
                                      " was generated under a different codebook/feature schema");
        data.per_ue.push_back(std::move(samples));
    }
    auto [val, vmeta] = read_dataset_csv(data_dir + "/dataset_val.csv");
    if (vmeta.config_hash != expect)
        throw SchemaMismatchError("validation dataset schema mismatch");
    data.validation = std::move(val);
    return data;
}

}  // namespace

void cmd_train(const ExperimentConfig& cfg, const std::string& data_dir,
               const std::string& out_dir, int parallel) {
    cfg.validate();
    fs::create_directories(out_dir);
    const FedData data = load_fed_data(cfg, data_dir);

    auto [model, logs] = run_training(cfg.fed, data, parallel);
    save_model(out_dir + "/checkpoint.json", model, schema_hash(cfg));

    const uint64_t chash = config_hash(cfg);
    CsvFile rounds(out_dir + "/rounds.csv", chash,
                   "round,ue,dataset_size,local_loss,global_val_loss,global_val_acc");
    for (const auto& log : logs)
        for (size_t g = 0; g < log.dataset_sizes.size(); ++g) {
            std::ostringstream os;
            os << log.round << ',' << g << ',' << log.dataset_sizes[g] << ','
               << fmt(log.local_loss[g]) << ',' << fmt(log.val_loss) << ',' << fmt(log.val_acc);
            rounds.row(os.str());
        }

    auto [perceptron, plogs] = train_perceptron_federated(cfg.fed, data);
    const double knn_acc = knn_accuracy(data.per_ue.front(), data.validation, cfg.knn_k);
    // KNN on all training data (pooled across UEs), matching a centralized baseline.
    std::vector<LabeledSample> pooled;
    for (const auto& ds : data.per_ue) pooled.insert(pooled.end(), ds.begin(), ds.end());
    const double knn_acc_pooled = knn_accuracy(pooled, data.validation, cfg.knn_k);

    CsvFile baselines(out_dir + "/baselines.csv", chash, "model,round,val_loss,val_acc");
    for (const auto& log : logs) {
        std::ostringstream os;
        os << "esn," << log.round << ',' << fmt(log.val_loss) << ',' << fmt(log.val_acc);
        baselines.row(os.str());
    }
    for (const auto& log : plogs) {
        std::ostringstream os;
        os << "perceptron," << log.round << ',' << fmt(log.val_loss) << ',' << fmt(log.val_acc);
        baselines.row(os.str());
    }
    baselines.row("knn_local,0,," + fmt(knn_acc));
    baselines.row("knn," + std::to_string(cfg.fed.rounds - 1) + ",," + fmt(knn_acc_pooled));

    write_run_manifest(out_dir + "/train_manifest.json", "train", cfg,
                       {out_dir + "/checkpoint.json", out_dir + "/rounds.csv",
                        out_dir + "/baselines.csv"});
}

namespace {

struct SeedOutcome {
    double se1 = 0.0, se2 = 0.0;
    long long oh1 = 0, oh2 = 0;
    double u2 = 0.0;
    CodebookChoice adaptive = CodebookChoice::type1;
    CodebookChoice oracle = CodebookChoice::type1;
};

}  // namespace

std::vector<ResultRow> cmd_evaluate(const ExperimentConfig& cfg, const std::string& checkpoint_dir,
                                    const std::string& out_dir, int parallel) {
    cfg.validate();
    fs::create_directories(out_dir);
    auto [model, ckpt_hash] = load_model(checkpoint_dir + "/checkpoint.json");
    if (ckpt_hash != schema_hash(cfg))
        throw SchemaMismatchError(
            "checkpoint was trained under a different codebook/feature schema");

    const DftBeamGrid grid = build_beam_grid(cfg.cb);
    const ArrayGeometry geom{cfg.cb.n1, cfg.cb.n2};
    const std::vector<Scenario> scenarios = evaluation_scenarios(cfg);
    const size_t n_cells = scenarios.size() * cfg.snr_grid_db.size();
    const size_t seeds = static_cast<size_t>(cfg.eval_seeds);

    std::vector<SeedOutcome> outcomes(n_cells * seeds);
    parallel_for(n_cells * seeds, parallel, [&](size_t item) {
        const size_t cell = item / seeds;
        const size_t seed_idx = item % seeds;
        const Scenario& sc = scenarios[cell / cfg.snr_grid_db.size()];
        const double snr = cfg.snr_grid_db[cell % cfg.snr_grid_db.size()];
        const uint64_t seed = seed_mix(cfg.master_seed, {0xEAA1u, cell, seed_idx});

        GeneratedSample gs = generate_sample(cfg, grid, sc, snr, seed);
        SeedOutcome& r = outcomes[item];
        r.adaptive = execute(model, gs.labeled.sequence);

        const ChannelRealization h_now = evolve(gs.h_csi, gs.profile, geom, cfg.staleness_s);
        r.se1 = mismatched_se(h_now, Pmi{gs.last.pmi_type1}, grid, cfg.cb, gs.noise_var)
                    .se_bits_per_use;
        r.se2 = mismatched_se(h_now, Pmi{gs.last.pmi_type2}, grid, cfg.cb, gs.noise_var)
                    .se_bits_per_use;
        r.oh1 = type1_overhead_bits(cfg.cb, gs.last.pmi_type1.rank).total_bits;
        r.oh2 = etype2_overhead_bits(cfg.cb, gs.last.pmi_type2.rank).total_bits;
        const long long tax = overhead_tax(cfg.cb, gs.last.pmi_type1.rank, gs.last.pmi_type2.rank);
        r.u2 = utility(CodebookChoice::etype2, se_gain(r.se2, r.se1), tax, cfg.util);
        r.oracle = r.u2 > 0.0 ? CodebookChoice::etype2 : CodebookChoice::type1;
    });

    std::vector<ResultRow> rows;
    for (size_t cell = 0; cell < n_cells; ++cell) {
        const Scenario& sc = scenarios[cell / cfg.snr_grid_db.size()];
        const double snr = cfg.snr_grid_db[cell % cfg.snr_grid_db.size()];
        double se[4] = {}, oh[4] = {}, ut[4] = {};
        double acc = 0.0;
        for (size_t s = 0; s < seeds; ++s) {
            const SeedOutcome& r = outcomes[cell * seeds + s];
            auto add = [&](Policy p, CodebookChoice c) {
                const size_t i = static_cast<size_t>(p);
                se[i] += c == CodebookChoice::etype2 ? r.se2 : r.se1;
                oh[i] += static_cast<double>(c == CodebookChoice::etype2 ? r.oh2 : r.oh1);
                ut[i] += c == CodebookChoice::etype2 ? r.u2 : 0.0;
            };
            add(Policy::type1, CodebookChoice::type1);
            add(Policy::etype2, CodebookChoice::etype2);
            add(Policy::adaptive, r.adaptive);
            add(Policy::oracle, r.oracle);
            acc += r.adaptive == r.oracle ? 1.0 : 0.0;
        }
        for (Policy p : {Policy::type1, Policy::etype2, Policy::adaptive, Policy::oracle}) {
            const size_t i = static_cast<size_t>(p);
            ResultRow row;
            row.scenario = sc.label;
            row.snr_db = snr;
            row.policy = p;
            row.mean_se = se[i] / static_cast<double>(seeds);
            row.mean_overhead_bits = oh[i] / static_cast<double>(seeds);
            row.mean_utility = ut[i] / static_cast<double>(seeds);
            row.accuracy = p == Policy::adaptive ? acc / static_cast<double>(seeds) : -1.0;
            row.seeds = static_cast<int>(seeds);
            rows.push_back(std::move(row));
        }
    }

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tuple(a.scenario, a.snr_db, static_cast<int>(a.policy)) <
               std::tuple(b.scenario, b.snr_db, static_cast<int>(b.policy));
    });

    CsvFile csv(out_dir + "/results.csv", config_hash(cfg),
                "scenario,snr_db,policy,mean_se,mean_overhead_bits,mean_utility,accuracy,seeds");
    for (const auto& r : rows) {
        std::ostringstream os;
        os << r.scenario << ',' << fmt(r.snr_db) << ',' << to_string(r.policy) << ','
           << fmt(r.mean_se) << ',' << fmt(r.mean_overhead_bits) << ',' << fmt(r.mean_utility)
           << ',' << (r.accuracy >= 0.0 ? fmt(r.accuracy) : std::string()) << ',' << r.seeds;
        csv.row(os.str());
    }
    write_run_manifest(out_dir + "/eval_manifest.json", "evaluate", cfg,
                       {out_dir + "/results.csv"});
    return rows;
}

std::vector<ResultRow> cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir,
                                 int parallel, bool per_point) {
    cfg.validate();
    fs::create_directories(out_dir);

    std::vector<ResultRow> rows;
    if (per_point) {
        for (double snr : cfg.snr_grid_db) {
            ExperimentConfig point = cfg;
            point.snr_grid_db = {snr};
            std::ostringstream dir;
            dir << out_dir << "/point_" << fmt(snr);
            fs::create_directories(dir.str());
            cmd_dataset(point, dir.str(), parallel);
            cmd_train(point, dir.str(), dir.str(), parallel);
            auto point_rows = cmd_evaluate(point, dir.str(), dir.str(), parallel);
            rows.insert(rows.end(), point_rows.begin(), point_rows.end());
        }
    } else {
        cmd_dataset(cfg, out_dir, parallel);
        cmd_train(cfg, out_dir, out_dir, parallel);
        rows = cmd_evaluate(cfg, out_dir, out_dir, parallel);
    }

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tuple(a.scenario, a.snr_db, static_cast<int>(a.policy)) <
               std::tuple(b.scenario, b.snr_db, static_cast<int>(b.policy));
    });
    CsvFile csv(out_dir + "/sweep.csv", config_hash(cfg),
                "scenario,snr_db,policy,mean_se,mean_overhead_bits,mean_utility,accuracy,seeds");
    for (const auto& r : rows) {
        std::ostringstream os;
        os << r.scenario << ',' << fmt(r.snr_db) << ',' << to_string(r.policy) << ','
           << fmt(r.mean_se) << ',' << fmt(r.mean_overhead_bits) << ',' << fmt(r.mean_utility)
           << ',' << (r.accuracy >= 0.0 ? fmt(r.accuracy) : std::string()) << ',' << r.seeds;
        csv.row(os.str());
    }
    write_run_manifest(out_dir + "/sweep_manifest.json", "sweep", cfg, {out_dir + "/sweep.csv"});
    return rows;
}

}  // namespace nrcba
