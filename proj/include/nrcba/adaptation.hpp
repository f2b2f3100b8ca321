// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nrcba/channel.hpp"
#include "nrcba/codebook.hpp"
#include "nrcba/link.hpp"

namespace nrcba {

struct UtilityConfig {
    double lambda = 1e-4;  // overhead-tax weight, 1/bits, in [0, 1]

    void validate() const {
        if (lambda < 0.0 || lambda > 1.0) throw Error("lambda must be in [0, 1]");
    }
};

// Utilities of the two codebook hypotheses for one channel sample. Type I
// is the baseline, so u0 is 0 by construction.
struct UtilityReport {
    double gain_type2 = 0.0;
    long long tax_bits = 0;
    double u0 = 0.0;
    double u1 = 0.0;
    CodebookChoice choice = CodebookChoice::type1;
};

// se_choice / se_baseline - 1.
double se_gain(double se_choice, double se_baseline);

// U(A) = gain - lambda * tax; the baseline choice always scores 0.
double utility(CodebookChoice choice, double gain, long long tax_bits, const UtilityConfig& cfg);

// Everything label_sample computes, kept so the harness can reuse the two
// searches for feature extraction.
struct LabeledDecision {
    UtilityReport report;
    TypeIPmi pmi_type1;
    ETypeIIPmi pmi_type2;
    LinkMetrics metrics_type1;
    LinkMetrics metrics_type2;
};

LabeledDecision label_sample_full(const ChannelRealization& h, const DftBeamGrid& grid,
                                  const CodebookConfig& cb_cfg, const UtilityConfig& util_cfg,
                                  double noise_var);

// Runs both PMI searches and labels the sample with the utility argmax;
// ties resolve to Type I.
std::pair<UtilityReport, CodebookChoice> label_sample(const ChannelRealization& h,
                                                      const DftBeamGrid& grid,
                                                      const CodebookConfig& cb_cfg,
                                                      const UtilityConfig& util_cfg,
                                                      double noise_var);

}  // namespace nrcba
