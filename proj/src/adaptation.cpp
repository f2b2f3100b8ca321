// SPDX-License-Identifier: Apache-2.0

#include "nrcba/adaptation.hpp"

namespace nrcba {

double se_gain(double se_choice, double se_baseline) {
    if (se_baseline <= 1e-12) throw BaselineZeroError("baseline spectral efficiency is zero");
    return se_choice / se_baseline - 1.0;
}

double utility(CodebookChoice choice, double gain, long long tax_bits, const UtilityConfig& cfg) {
    cfg.validate();
    if (choice == CodebookChoice::type1) return 0.0;
    if (tax_bits < 0) throw NegativeTaxError("tax_bits must be >= 0");
    return gain - cfg.lambda * static_cast<double>(tax_bits);
}

LabeledDecision label_sample_full(const ChannelRealization& h, const DftBeamGrid& grid,
                                  const CodebookConfig& cb_cfg, const UtilityConfig& util_cfg,
                                  double noise_var) {
    util_cfg.validate();
    LabeledDecision d;
    std::tie(d.pmi_type1, d.metrics_type1) = select_type1_pmi(h, grid, cb_cfg, noise_var);
    std::tie(d.pmi_type2, d.metrics_type2) = select_etype2_pmi(h, grid, cb_cfg, noise_var);

    d.report.gain_type2 = se_gain(d.metrics_type2.se_bits_per_use, d.metrics_type1.se_bits_per_use);
    d.report.tax_bits = overhead_tax(cb_cfg, d.pmi_type1.rank, d.pmi_type2.rank);
    d.report.u0 = 0.0;
    d.report.u1 = utility(CodebookChoice::etype2, d.report.gain_type2, d.report.tax_bits, util_cfg);
    d.report.choice = d.report.u1 > d.report.u0 ? CodebookChoice::etype2 : CodebookChoice::type1;
    return d;
}

std::pair<UtilityReport, CodebookChoice> label_sample(const ChannelRealization& h,
                                                      const DftBeamGrid& grid,
                                                      const CodebookConfig& cb_cfg,
                                                      const UtilityConfig& util_cfg,
                                                      double noise_var) {
    LabeledDecision d = label_sample_full(h, grid, cb_cfg, util_cfg, noise_var);
    return {d.report, d.report.choice};
}

}  // namespace nrcba
