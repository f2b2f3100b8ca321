// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <utility>
#include <vector>

#include "nrcba/fed.hpp"

namespace nrcba {

// Classical baselines for the model comparison: both operate on the
// time-averaged indicator vector of a sample.
std::vector<double> time_averaged_features(const LabeledSample& sample);

// Single-layer sigmoid perceptron (weights + bias) trained with the same
// lr/batch/epochs and the same federated schedule as the ESN readout.
struct LinearModel {
    arma::rowvec w;  // 1 x (dim + 1)
};

double perceptron_forward(const LinearModel& m, const LabeledSample& sample);
double perceptron_loss(const LinearModel& m, const std::vector<LabeledSample>& dataset);
double perceptron_accuracy(const LinearModel& m, const std::vector<LabeledSample>& dataset);

struct BaselineRoundLog {
    int round = 0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

std::pair<LinearModel, std::vector<BaselineRoundLog>> train_perceptron_federated(
    const FederationConfig& cfg, const FedData& data);

// k-nearest-neighbour vote on time-averaged features; ties in the vote
// fall back to label 0 (the cheaper codebook).
int knn_predict(const std::vector<LabeledSample>& train, const LabeledSample& query, int k);
double knn_accuracy(const std::vector<LabeledSample>& train,
                    const std::vector<LabeledSample>& test, int k);

}  // namespace nrcba
