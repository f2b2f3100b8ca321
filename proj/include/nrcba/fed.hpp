// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "nrcba/codebook.hpp"
#include "nrcba/rc.hpp"

namespace nrcba {

struct FederationConfig {
    int n_ues = 8;
    int rounds = 15;
    uint64_t master_seed = 1;
    TrainConfig train;
    int reservoir_size = 64;
    double spectral_radius = 0.9;
    double leak = 1.0;

    void validate() const {
        if (n_ues < 1 || rounds < 1) throw Error("invalid federation config");
        train.validate();
    }
};

struct RoundLog {
    int round = 0;
    std::vector<size_t> dataset_sizes;   // per UE
    std::vector<double> local_loss;      // per UE, final local epoch
    double val_loss = 0.0;
    double val_acc = 0.0;
};

// Per-UE local datasets plus a held-out validation set; produced
// deterministically from (master_seed, ue index) by the harness.
struct FedData {
    std::vector<std::vector<LabeledSample>> per_ue;
    std::vector<LabeledSample> validation;
};

// Dataset-size-weighted mean of the readouts; reservoirs must be
// byte-identical across models.
EsnModel fedavg(const std::vector<EsnModel>& models, const std::vector<size_t>& sizes);

// Synchronous rounds: broadcast global, train locally, aggregate, log.
// Results are independent of UE processing order.
std::pair<EsnModel, std::vector<RoundLog>> run_training(const FederationConfig& cfg,
                                                        const FedData& data,
                                                        int n_threads = 1);

// A_g = 1 (EType II) iff the readout probability strictly exceeds the
// threshold; ties favor the cheaper codebook.
CodebookChoice execute(const EsnModel& model, const std::vector<IndicatorVector>& x_seq,
                       double threshold = 0.5);

}  // namespace nrcba
