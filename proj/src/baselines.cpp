// SPDX-License-Identifier: Apache-2.0

#include "nrcba/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nrcba/rng.hpp"

namespace nrcba {

std::vector<double> time_averaged_features(const LabeledSample& sample) {
    if (sample.sequence.empty()) throw Error("empty sample sequence");
    std::vector<double> mean(sample.sequence.front().values.size(), 0.0);
    for (const auto& step : sample.sequence)
        for (size_t i = 0; i < mean.size(); ++i) mean[i] += step.values[i];
    for (double& v : mean) v /= static_cast<double>(sample.sequence.size());
    return mean;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double bce(double p, int label) {
    const double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return label ? -std::log(q) : -std::log(1.0 - q);
}

arma::vec features_with_bias(const LabeledSample& sample) {
    const std::vector<double> f = time_averaged_features(sample);
    arma::vec x(f.size() + 1);
    std::copy(f.begin(), f.end(), x.begin());
    x(x.n_elem - 1) = 1.0;
    return x;
}

LinearModel train_local_linear(const LinearModel& model, const std::vector<LabeledSample>& dataset,
                               const TrainConfig& cfg, uint64_t shuffle_seed) {
    LinearModel m = model;
    Rng rng(seed_mix(shuffle_seed, {0x11EAu}));
    std::vector<size_t> idx(dataset.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(idx.begin(), idx.end(), size_t{0});
        rng.shuffle(idx);
        for (size_t start = 0; start < idx.size(); start += static_cast<size_t>(cfg.batch)) {
            const size_t stop = std::min(idx.size(), start + static_cast<size_t>(cfg.batch));
            arma::rowvec grad(m.w.n_elem, arma::fill::zeros);
            for (size_t i = start; i < stop; ++i) {
                const arma::vec x = features_with_bias(dataset[idx[i]]);
                const double p = sigmoid(arma::dot(m.w, x));
                grad += (p - dataset[idx[i]].label) * x.t();
            }
            grad /= static_cast<double>(stop - start);
            m.w -= cfg.lr * grad;
        }
    }
    return m;
}

}  // namespace

double perceptron_forward(const LinearModel& m, const LabeledSample& sample) {
    return sigmoid(arma::dot(m.w, features_with_bias(sample)));
}

double perceptron_loss(const LinearModel& m, const std::vector<LabeledSample>& dataset) {
    if (dataset.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : dataset) total += bce(perceptron_forward(m, s), s.label);
    return total / static_cast<double>(dataset.size());
}

double perceptron_accuracy(const LinearModel& m, const std::vector<LabeledSample>& dataset) {
    if (dataset.empty()) return 0.0;
    int correct = 0;
    for (const auto& s : dataset) correct += (perceptron_forward(m, s) > 0.5 ? 1 : 0) == s.label;
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

std::pair<LinearModel, std::vector<BaselineRoundLog>> train_perceptron_federated(
    const FederationConfig& cfg, const FedData& data) {
    cfg.validate();
    const int dim = static_cast<int>(data.per_ue.front().front().sequence.front().values.size());
    LinearModel global;
    global.w.zeros(static_cast<arma::uword>(dim + 1));

    std::vector<size_t> sizes(data.per_ue.size());
    size_t total = 0;
    for (size_t g = 0; g < data.per_ue.size(); ++g) {
        sizes[g] = data.per_ue[g].size();
        total += sizes[g];
    }

    std::vector<BaselineRoundLog> logs;
    for (int round = 0; round < cfg.rounds; ++round) {
        arma::rowvec agg(global.w.n_elem, arma::fill::zeros);
        for (size_t g = 0; g < data.per_ue.size(); ++g) {
            const LinearModel local = train_local_linear(
                global, data.per_ue[g], cfg.train,
                seed_mix(cfg.master_seed, {0xBA5Eu, static_cast<uint64_t>(round)}));
            agg += (static_cast<double>(sizes[g]) / static_cast<double>(total)) * local.w;
        }
        global.w = agg;
        logs.push_back({round, perceptron_loss(global, data.validation),
                        perceptron_accuracy(global, data.validation)});
    }
    return {std::move(global), std::move(logs)};
}

int knn_predict(const std::vector<LabeledSample>& train, const LabeledSample& query, int k) {
    if (train.empty()) throw Error("knn: empty training set");
    const std::vector<double> q = time_averaged_features(query);
    std::vector<std::pair<double, size_t>> dist;
    dist.reserve(train.size());
    for (size_t i = 0; i < train.size(); ++i) {
        const std::vector<double> t = time_averaged_features(train[i]);
        double d = 0.0;
        for (size_t j = 0; j < q.size(); ++j) d += (q[j] - t[j]) * (q[j] - t[j]);
        dist.emplace_back(d, i);
    }
    std::sort(dist.begin(), dist.end());
    int votes = 0;
    const int kk = std::min<int>(k, static_cast<int>(dist.size()));
    for (int i = 0; i < kk; ++i) votes += train[dist[static_cast<size_t>(i)].second].label;
    return 2 * votes > kk ? 1 : 0;
}

double knn_accuracy(const std::vector<LabeledSample>& train,
                    const std::vector<LabeledSample>& test, int k) {
    if (test.empty()) return 0.0;
    int correct = 0;
    for (const auto& s : test) correct += knn_predict(train, s, k) == s.label;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace nrcba
