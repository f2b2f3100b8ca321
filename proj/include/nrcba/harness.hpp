// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nrcba/adaptation.hpp"
#include "nrcba/channel.hpp"
#include "nrcba/codebook.hpp"
#include "nrcba/features.hpp"
#include "nrcba/fed.hpp"
#include "nrcba/parallel.hpp"

namespace nrcba {

// One evaluation/training channel condition.
struct Scenario {
    ProfileKind kind = ProfileKind::nlos_rich;
    double speed_mps = 0.833;
    double delay_spread_s = 363e-9;
    double weight = 1.0;
    std::string label;
};

struct ExperimentConfig {
    CodebookConfig cb;
    UtilityConfig util;
    FederationConfig fed;

    int n_rb = 26;  // desk scale; paper scale is 106
    int n_ue_antennas = 4;
    double carrier_hz = 2.12e9;
    std::vector<std::pair<ProfileKind, double>> kind_weights = {
        {ProfileKind::los_high_corr, 1.0},
        {ProfileKind::nlos_rich, 1.0},
        {ProfileKind::nlos_long_delay, 1.0}};
    std::vector<double> speeds_mps = {0.833, 16.67};            // 3 and 60 km/h
    std::vector<double> delay_spreads_s = {363e-9, 8000e-9};
    std::vector<double> snr_grid_db = {0, 10, 20, 30, 40, 50};
    double csi_period_s = 0.005;
    double staleness_s = 0.005;
    int sequence_len = 8;  // T CSI-RS periods per sample
    int samples_per_ue = 200;
    int val_samples_per_ue = 25;
    int eval_seeds = 20;
    int knn_k = 5;
    // "mixed": every UE draws from the full scenario mix; "partition":
    // scenarios are assigned round-robin, one per UE.
    std::string ue_scenario_mode = "mixed";
    // "natural": each profile kind at its natural delay spread; "full":
    // the whole kind x speed x delay grid.
    std::string eval_mode = "natural";
    uint64_t master_seed = 1;

    void validate() const;
};

ExperimentConfig default_config();

// key = value file, '#' comments; unknown keys and malformed values raise
// ConfigError with the offending line number.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Stable textual dump of every field; its hash identifies a run.
std::string canonical_config_text(const ExperimentConfig& cfg);
uint64_t config_hash(const ExperimentConfig& cfg);
// Hash of only the codebook + feature-schema + sequence fields; a loaded
// checkpoint must agree with the evaluating config on this.
uint64_t schema_hash(const ExperimentConfig& cfg);

// Training mix: kinds x speeds x delay spreads, kind weights split evenly.
std::vector<Scenario> training_scenarios(const ExperimentConfig& cfg);
std::vector<Scenario> evaluation_scenarios(const ExperimentConfig& cfg);

// One fully generated sample: a T-step indicator sequence labeled by the
// ideal-SE utility argmax at the last CSI-RS period, plus everything the
// evaluator needs to apply the stale PMIs later.
struct GeneratedSample {
    LabeledSample labeled;
    LabeledDecision last;
    ChannelProfile profile;
    ChannelRealization h_csi;
    double snr_db = 0.0;
    double noise_var = 1.0;
};

GeneratedSample generate_sample(const ExperimentConfig& cfg, const DftBeamGrid& grid,
                                const Scenario& scenario, double snr_db, uint64_t seed);

enum class Policy { type1 = 0, etype2 = 1, adaptive = 2, oracle = 3 };
std::string to_string(Policy p);

struct ResultRow {
    std::string scenario;
    double snr_db = 0.0;
    Policy policy = Policy::type1;
    double mean_se = 0.0;
    double mean_overhead_bits = 0.0;
    double mean_utility = 0.0;
    double accuracy = -1.0;  // adaptive only; < 0 means not applicable
    int seeds = 0;
};

// Commands; IO happens under out_dir, datasets/checkpoints are found by
// fixed file names. All throw ConfigError/IoError on failure.
void cmd_dataset(const ExperimentConfig& cfg, const std::string& out_dir, int parallel);
void cmd_train(const ExperimentConfig& cfg, const std::string& data_dir,
               const std::string& out_dir, int parallel);
std::vector<ResultRow> cmd_evaluate(const ExperimentConfig& cfg, const std::string& checkpoint_dir,
                                    const std::string& out_dir, int parallel);
std::vector<ResultRow> cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir,
                                 int parallel, bool per_point);

}  // namespace nrcba
