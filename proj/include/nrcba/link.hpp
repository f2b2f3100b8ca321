// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <utility>
#include <variant>
#include <vector>

#include "nrcba/channel.hpp"
#include "nrcba/codebook.hpp"

namespace nrcba {

// Per-RB PDSCH precoders F^n. Columns are renormalized to 1/sqrt(rank)
// so every RB transmits total power 1 (degenerate zero layers excepted).
struct PrecoderSet {
    std::vector<arma::cx_mat> per_rb;  // n_rb entries, n_ports x rank
    int rank = 1;
    CodebookChoice source = CodebookChoice::type1;
};

struct LinkMetrics {
    arma::mat sinr;                 // n_rb x rank, linear
    double se_bits_per_use = 0.0;   // sum_r sum_n log2(1 + SINR)
    int cqi = 0;                    // 4-bit staircase from mean SINR
    double noise_var = 0.0;
};

// CSI-RS pilot precoder W^csi; identity (non-precoded) by default.
arma::cx_mat csi_rs_precoder(int n_ports);

// Composition F = W^csi * W with per-column renormalization; pass
// w_csi = nullptr for the identity default.
PrecoderSet build_precoder_set(const TypeIPmi& pmi, const DftBeamGrid& grid, int n_rb,
                               const arma::cx_mat* w_csi = nullptr);
PrecoderSet build_precoder_set(const ETypeIIPmi& pmi, const DftBeamGrid& grid,
                               const CodebookConfig& config, int n_rb,
                               const arma::cx_mat* w_csi = nullptr);

// G = H^H (H H^H + noise_var I)^-1, rows are the per-stream equalizers.
arma::cx_mat mmse_irc_equalizer(const arma::cx_mat& h_eff, double noise_var);

// Per-stream post-equalization SINR: |G_r H F_r|^2 over inter-stream
// interference plus ||G_r||^2 * noise.
double sinr(const arma::cx_rowvec& g_row, const arma::cx_mat& h, const arma::cx_mat& f,
            int stream, double noise_var);

LinkMetrics spectral_efficiency(const ChannelRealization& h, const PrecoderSet& precoders,
                                double noise_var);

// 16-level staircase, thresholds -6 dB to +24 dB in 2 dB steps.
int cqi_from_sinr(double mean_sinr_db);

// Exhaustive wideband-beam / per-subband co-phase / rank search maximizing
// spectral efficiency. Ties break to lower rank, then lower i11, then i12.
std::pair<TypeIPmi, LinkMetrics> select_type1_pmi(const ChannelRealization& h,
                                                  const DftBeamGrid& grid,
                                                  const CodebookConfig& config, double noise_var);

// Projection-based EType II search: rotation and beams from projected
// power, per-subband singular-vector targets, frequency compression onto M
// bases, K_nz quantized coefficients, rank by reconstructed SE.
std::pair<ETypeIIPmi, LinkMetrics> select_etype2_pmi(const ChannelRealization& h,
                                                     const DftBeamGrid& grid,
                                                     const CodebookConfig& config,
                                                     double noise_var);

using Pmi = std::variant<TypeIPmi, ETypeIIPmi>;

// Realized SE when precoding today's channel with a PMI searched on an
// earlier realization.
LinkMetrics mismatched_se(const ChannelRealization& h_now, const Pmi& stale_pmi,
                          const DftBeamGrid& grid, const CodebookConfig& config,
                          double noise_var);

namespace detail {

// Per-stream SINRs of the exact MMSE equalizer computed from the r x r
// Gram identity; algebraically equal to the mmse_irc_equalizer + sinr
// route (pinned by tests) and much cheaper inside the search loops.
arma::vec mmse_stream_sinrs(const arma::cx_mat& h_eff, double noise_var);

}  // namespace detail

}  // namespace nrcba
