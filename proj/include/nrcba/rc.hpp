// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nrcba/features.hpp"

namespace nrcba {

// Fixed random reservoir: dense uniform [-1, 1] recurrence rescaled to the
// target spectral radius, input weights uniform [-0.5, 0.5]. Frozen after
// construction; only the readout ever trains.
struct Reservoir {
    int size = 64;
    int input_dim = 0;
    double rho = 0.9;
    double leak = 1.0;
    uint64_t seed = 0;
    arma::mat w_in;   // size x input_dim
    arma::mat w_res;  // size x size
};

Reservoir init_reservoir(int input_dim, int size, double rho, uint64_t seed, double leak = 1.0);

// Identity of the frozen part; FedAvg refuses to mix models whose
// reservoirs differ.
uint64_t reservoir_hash(const Reservoir& r);

struct EsnModel {
    std::shared_ptr<const Reservoir> reservoir;
    arma::rowvec w_out;  // 1 x (size + 1), last entry is the bias
};

EsnModel make_model(std::shared_ptr<const Reservoir> reservoir);

struct TrainConfig {
    double lr = 0.001;
    int batch = 32;
    int epochs = 20;

    void validate() const {
        if (lr < 0.0 || batch < 1 || epochs < 0) throw Error("invalid train config");
    }
};

// state' = (1 - leak) * state + leak * tanh(w_in x + w_res state).
arma::vec advance(const Reservoir& r, const arma::vec& state, const std::vector<double>& x);

// Runs the reservoir from the zero state over the sequence; returns the
// probability of label 1 from the sigmoid readout.
double forward(const EsnModel& model, const std::vector<IndicatorVector>& sequence);

// Final reservoir state (with bias appended) for a sequence; the training
// gradient is (p - y) times this.
arma::vec final_state_with_bias(const EsnModel& model,
                                const std::vector<IndicatorVector>& sequence);

// Binary cross-entropy with the probability clamped away from {0, 1}.
double loss(double p, int label);

// One gradient step on the mean batch loss; reservoir untouched.
EsnModel train_step(const EsnModel& model, const std::vector<LabeledSample>& batch,
                    const TrainConfig& cfg);

struct TrainResult {
    EsnModel model;
    std::vector<double> loss_trace;  // mean training loss per epoch
};

// Seeded-shuffle minibatch SGD; the final partial batch is kept.
TrainResult train_local(const EsnModel& model, const std::vector<LabeledSample>& dataset,
                        const TrainConfig& cfg, uint64_t shuffle_seed);

double mean_loss(const EsnModel& model, const std::vector<LabeledSample>& dataset);
double accuracy(const EsnModel& model, const std::vector<LabeledSample>& dataset,
                double threshold = 0.5);

// Versioned checkpoint: reservoir stored as (dims, rho, leak, seed) and
// reconstructed on load, w_out stored in full precision.
void save_model(const std::string& path, const EsnModel& model, uint64_t config_hash);
std::pair<EsnModel, uint64_t> load_model(const std::string& path);

}  // namespace nrcba
