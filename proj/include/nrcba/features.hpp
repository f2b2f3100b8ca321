// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "nrcba/channel.hpp"
#include "nrcba/codebook.hpp"
#include "nrcba/link.hpp"

namespace nrcba {

// Fixed layout of the CSI-indicator vector:
//   APS (16) | DPS (16) | rank_ratio, velocity, snr, cqi1, cqi2 | bitmap (2L)
struct IndicatorSchema {
    int aps_bins = 16;
    int dps_bins = 16;
    int n_scalars = 5;
    int bitmap_dim = 8;  // 2L

    int total_dim() const { return aps_bins + dps_bins + n_scalars + bitmap_dim; }

    bool operator==(const IndicatorSchema&) const = default;
};

IndicatorSchema make_schema(const CodebookConfig& config);

struct IndicatorVector {
    std::vector<double> values;
};

struct LabeledSample {
    std::vector<IndicatorVector> sequence;  // T consecutive CSI-RS periods
    int label = 0;                          // CodebookChoice as int
};

// Power across the n1*n2 orthogonal beams folded into `bins` bins and
// normalized to sum 1; a zero channel yields the uniform spectrum.
std::vector<double> angle_power_spectrum(const ChannelRealization& h, const DftBeamGrid& grid,
                                         int bins = 16);

// Power of the delay taps (inverse DFT across RBs, averaged over antenna
// pairs) folded into `bins` bins and normalized to sum 1.
std::vector<double> delay_power_spectrum(const ChannelRealization& h, int bins = 16);

// sigma1^2 / (sigma1^2 + sigma2^2) of the stacked channel; in [0.5, 1]
// whenever at least two singular values exist.
double rank_power_ratio(const ChannelRealization& h);

// Per beam-row fraction of frequency-basis positions holding a nonzero
// coefficient, averaged over layers.
std::vector<double> bitmap_density(const ETypeIIPmi& pmi, const CodebookConfig& config);

IndicatorVector assemble(const ChannelRealization& h, const DftBeamGrid& grid,
                         const CodebookConfig& cb_cfg, const ETypeIIPmi& pmi_type2,
                         const LinkMetrics& link_type1, const LinkMetrics& link_type2,
                         double velocity_mps, double snr_db);

// Dataset file: one CSV row per sample, T * dim feature values then the
// label, plus a JSON sidecar with schema version, T, dim and seed info.
struct DatasetMeta {
    int schema_version = 1;
    int t_steps = 8;
    int dim = 45;
    uint64_t config_hash = 0;
    uint64_t seed = 0;
    size_t count = 0;
};

void write_dataset_csv(const std::string& path, const std::vector<LabeledSample>& samples,
                       const DatasetMeta& meta);
std::pair<std::vector<LabeledSample>, DatasetMeta> read_dataset_csv(const std::string& path);
void write_dataset_meta(const std::string& path, const DatasetMeta& meta);
DatasetMeta read_dataset_meta(const std::string& path);

}  // namespace nrcba
