// SPDX-License-Identifier: Apache-2.0

#include "nrcba/fed.hpp"

#include <numeric>

#include "nrcba/parallel.hpp"
#include "nrcba/rng.hpp"

namespace nrcba {

EsnModel fedavg(const std::vector<EsnModel>& models, const std::vector<size_t>& sizes) {
    if (models.empty() || models.size() != sizes.size())
        throw Error("fedavg: models and sizes must be non-empty and aligned");
    const uint64_t hash0 = reservoir_hash(*models.front().reservoir);
    size_t total = 0;
    for (size_t g = 0; g < models.size(); ++g) {
        if (sizes[g] == 0) throw Error("fedavg: dataset sizes must be positive");
        if (reservoir_hash(*models[g].reservoir) != hash0)
            throw ReservoirMismatchError("fedavg: reservoirs differ across models");
        total += sizes[g];
    }
    EsnModel global = models.front();
    global.w_out.zeros();
    for (size_t g = 0; g < models.size(); ++g)
        global.w_out += (static_cast<double>(sizes[g]) / static_cast<double>(total)) *
                        models[g].w_out;
    return global;
}

std::pair<EsnModel, std::vector<RoundLog>> run_training(const FederationConfig& cfg,
                                                        const FedData& data, int n_threads) {
    cfg.validate();
    if (static_cast<int>(data.per_ue.size()) != cfg.n_ues)
        throw Error("run_training: per-UE dataset count != n_ues");
    for (const auto& ds : data.per_ue)
        if (ds.empty()) throw Error("run_training: every UE needs a non-empty dataset");

    const int input_dim = static_cast<int>(data.per_ue.front().front().sequence.front().values.size());
    auto reservoir = std::make_shared<Reservoir>(
        init_reservoir(input_dim, cfg.reservoir_size, cfg.spectral_radius,
                       seed_mix(cfg.master_seed, {0x9E5Eu}), cfg.leak));
    EsnModel global = make_model(reservoir);

    std::vector<size_t> sizes(data.per_ue.size());
    for (size_t g = 0; g < data.per_ue.size(); ++g) sizes[g] = data.per_ue[g].size();

    std::vector<RoundLog> logs;
    logs.reserve(static_cast<size_t>(cfg.rounds));
    for (int round = 0; round < cfg.rounds; ++round) {
        // The shuffle stream is keyed by the round only, so UEs holding
        // identical datasets produce identical updates (their average then
        // collapses to the single-UE trajectory).
        const uint64_t shuffle_seed =
            seed_mix(cfg.master_seed, {0x10CA1u, static_cast<uint64_t>(round)});
        std::vector<EsnModel> locals(data.per_ue.size());
        std::vector<double> final_loss(data.per_ue.size(), 0.0);
        parallel_for(data.per_ue.size(), n_threads, [&](size_t g) {
            TrainResult r = train_local(global, data.per_ue[g], cfg.train, shuffle_seed);
            final_loss[g] = r.loss_trace.empty() ? 0.0 : r.loss_trace.back();
            locals[g] = std::move(r.model);
        });
        RoundLog log;
        log.round = round;
        log.dataset_sizes = sizes;
        log.local_loss = final_loss;
        global = fedavg(locals, sizes);
        log.val_loss = mean_loss(global, data.validation);
        log.val_acc = accuracy(global, data.validation);
        logs.push_back(std::move(log));
    }
    return {std::move(global), std::move(logs)};
}

CodebookChoice execute(const EsnModel& model, const std::vector<IndicatorVector>& x_seq,
                       double threshold) {
    return forward(model, x_seq) > threshold ? CodebookChoice::etype2 : CodebookChoice::type1;
}

}  // namespace nrcba
