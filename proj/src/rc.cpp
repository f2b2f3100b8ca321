// SPDX-License-Identifier: Apache-2.0

#include "nrcba/rc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "nrcba/rng.hpp"

namespace nrcba {

Reservoir init_reservoir(int input_dim, int size, double rho, uint64_t seed, double leak) {
    if (size < 1 || input_dim < 1) throw Error("reservoir dimensions must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw Error("spectral radius must be in (0, 1)");
    if (!(leak > 0.0 && leak <= 1.0)) throw Error("leak must be in (0, 1]");

    for (uint64_t attempt = 0;; ++attempt) {
        Rng rng(seed_mix(seed + attempt, {0xE5Bu}));
        Reservoir r;
        r.size = size;
        r.input_dim = input_dim;
        r.rho = rho;
        r.leak = leak;
        r.seed = seed;
        r.w_in.set_size(static_cast<arma::uword>(size), static_cast<arma::uword>(input_dim));
        for (auto& v : r.w_in) v = rng.uniform(-0.5, 0.5);
        r.w_res.set_size(static_cast<arma::uword>(size), static_cast<arma::uword>(size));
        for (auto& v : r.w_res) v = rng.uniform(-1.0, 1.0);

        const arma::cx_vec eigs = arma::eig_gen(r.w_res);
        const double raw_radius = arma::abs(eigs).max();
        if (raw_radius < 1e-12) continue;  // degenerate spectrum: resample with seed+1
        r.w_res *= rho / raw_radius;
        return r;
    }
}

uint64_t reservoir_hash(const Reservoir& r) {
    uint64_t h = fnv1a64(&r.size, sizeof r.size);
    h = fnv1a64(&r.input_dim, sizeof r.input_dim, h);
    h = fnv1a64(&r.rho, sizeof r.rho, h);
    h = fnv1a64(&r.leak, sizeof r.leak, h);
    h = fnv1a64(&r.seed, sizeof r.seed, h);
    h = fnv1a64(r.w_in.memptr(), r.w_in.n_elem * sizeof(double), h);
    h = fnv1a64(r.w_res.memptr(), r.w_res.n_elem * sizeof(double), h);
    return h;
}

EsnModel make_model(std::shared_ptr<const Reservoir> reservoir) {
    EsnModel m;
    m.w_out.zeros(static_cast<arma::uword>(reservoir->size + 1));
    m.reservoir = std::move(reservoir);
    return m;
}

arma::vec advance(const Reservoir& r, const arma::vec& state, const std::vector<double>& x) {
    if (static_cast<int>(state.n_elem) != r.size) throw Error("state size mismatch");
    if (static_cast<int>(x.size()) != r.input_dim) throw SchemaMismatchError("input dim mismatch");
    const arma::vec xv(const_cast<double*>(x.data()), static_cast<arma::uword>(x.size()), false,
                       true);
    return (1.0 - r.leak) * state + r.leak * arma::tanh(r.w_in * xv + r.w_res * state);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

arma::vec run_sequence(const Reservoir& r, const std::vector<IndicatorVector>& sequence) {
    if (sequence.empty()) throw Error("empty input sequence");
    arma::vec state(static_cast<arma::uword>(r.size), arma::fill::zeros);
    for (const auto& step : sequence) state = advance(r, state, step.values);
    return state;
}

}  // namespace

arma::vec final_state_with_bias(const EsnModel& model,
                                const std::vector<IndicatorVector>& sequence) {
    arma::vec state = run_sequence(*model.reservoir, sequence);
    state.resize(state.n_elem + 1);
    state(state.n_elem - 1) = 1.0;
    return state;
}

double forward(const EsnModel& model, const std::vector<IndicatorVector>& sequence) {
    return sigmoid(arma::dot(model.w_out, final_state_with_bias(model, sequence)));
}

double loss(double p, int label) {
    const double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return label ? -std::log(q) : -std::log(1.0 - q);
}

namespace {

// Shared SGD step; returns the mean pre-update batch loss so the epoch
// trace comes for free from the gradient pass.
double step_in_place(EsnModel& model, const std::vector<const LabeledSample*>& batch,
                     const TrainConfig& cfg) {
    arma::rowvec grad(model.w_out.n_elem, arma::fill::zeros);
    double batch_loss = 0.0;
    for (const LabeledSample* sample : batch) {
        const arma::vec sb = final_state_with_bias(model, sample->sequence);
        const double p = sigmoid(arma::dot(model.w_out, sb));
        grad += (p - sample->label) * sb.t();
        batch_loss += loss(p, sample->label);
    }
    grad /= static_cast<double>(batch.size());
    model.w_out -= cfg.lr * grad;
    return batch_loss / static_cast<double>(batch.size());
}

}  // namespace

EsnModel train_step(const EsnModel& model, const std::vector<LabeledSample>& batch,
                    const TrainConfig& cfg) {
    cfg.validate();
    if (batch.empty()) throw Error("empty training batch");
    std::vector<const LabeledSample*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& s : batch) ptrs.push_back(&s);
    EsnModel next = model;
    step_in_place(next, ptrs, cfg);
    return next;
}

TrainResult train_local(const EsnModel& model, const std::vector<LabeledSample>& dataset,
                        const TrainConfig& cfg, uint64_t shuffle_seed) {
    cfg.validate();
    if (dataset.empty()) throw Error("empty training dataset");
    TrainResult result;
    result.model = model;
    Rng rng(seed_mix(shuffle_seed, {0x5u, 0xFFu}));
    std::vector<size_t> idx(dataset.size());
    std::vector<const LabeledSample*> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(idx.begin(), idx.end(), size_t{0});
        rng.shuffle(idx);
        double epoch_loss = 0.0;
        size_t n_batches = 0;
        for (size_t start = 0; start < idx.size(); start += static_cast<size_t>(cfg.batch)) {
            const size_t stop = std::min(idx.size(), start + static_cast<size_t>(cfg.batch));
            batch.clear();
            for (size_t i = start; i < stop; ++i) batch.push_back(&dataset[idx[i]]);
            epoch_loss += step_in_place(result.model, batch, cfg);
            ++n_batches;
        }
        result.loss_trace.push_back(epoch_loss / static_cast<double>(n_batches));
    }
    return result;
}

double mean_loss(const EsnModel& model, const std::vector<LabeledSample>& dataset) {
    if (dataset.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : dataset) total += loss(forward(model, s.sequence), s.label);
    return total / static_cast<double>(dataset.size());
}

double accuracy(const EsnModel& model, const std::vector<LabeledSample>& dataset,
                double threshold) {
    if (dataset.empty()) return 0.0;
    int correct = 0;
    for (const auto& s : dataset) {
        const int pred = forward(model, s.sequence) > threshold ? 1 : 0;
        correct += pred == s.label;
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

void save_model(const std::string& path, const EsnModel& model, uint64_t config_hash) {
    nlohmann::json j{{"version", 1},
                     {"input_dim", model.reservoir->input_dim},
                     {"size", model.reservoir->size},
                     {"rho", model.reservoir->rho},
                     {"leak", model.reservoir->leak},
                     {"seed", model.reservoir->seed},
                     {"config_hash", config_hash},
                     {"w_out", std::vector<double>(model.w_out.begin(), model.w_out.end())}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

std::pair<EsnModel, uint64_t> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    if (j.at("version").get<int>() != 1) throw IoError("unsupported checkpoint version");
    auto reservoir = std::make_shared<Reservoir>(
        init_reservoir(j.at("input_dim").get<int>(), j.at("size").get<int>(),
                       j.at("rho").get<double>(), j.at("seed").get<uint64_t>(),
                       j.at("leak").get<double>()));
    EsnModel model = make_model(reservoir);
    const auto w = j.at("w_out").get<std::vector<double>>();
    if (w.size() != model.w_out.n_elem) throw IoError("checkpoint readout size mismatch");
    std::copy(w.begin(), w.end(), model.w_out.begin());
    return {std::move(model), j.at("config_hash").get<uint64_t>()};
}

}  // namespace nrcba
