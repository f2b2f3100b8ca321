// SPDX-License-Identifier: Apache-2.0

#include "nrcba/link.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace nrcba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvLn2 = 1.4426950408889634;  // 1/ln(2)

using cx = std::complex<double>;

// Cholesky T = L L^H in place (column-major, r <= 4) and the diagonal of
// T^{-1} via forward solves. Returns false on a non-positive pivot.
bool inverse_diagonal_hpd(int r, cx* t, double* out_diag) {
    for (int j = 0; j < r; ++j) {
        double d = t[j * r + j].real();
        for (int k = 0; k < j; ++k) d -= std::norm(t[k * r + j]);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        t[j * r + j] = ljj;
        for (int i = j + 1; i < r; ++i) {
            cx s = t[j * r + i];
            for (int k = 0; k < j; ++k) s -= t[k * r + i] * std::conj(t[k * r + j]);
            t[j * r + i] = s / ljj;
        }
    }
    std::array<cx, 4> z;
    for (int k = 0; k < r; ++k) {
        double acc = 0.0;
        for (int i = k; i < r; ++i) {
            cx s = (i == k) ? cx(1.0) : cx(0.0);
            for (int m = k; m < i; ++m) s -= t[m * r + i] * z[static_cast<size_t>(m)];
            z[static_cast<size_t>(i)] = s / t[i * r + i].real();
            acc += std::norm(z[static_cast<size_t>(i)]);
        }
        out_diag[k] = acc;
    }
    return true;
}

// SINRs for an effective channel given as r column pointers of length
// n_ue; shared kernel of the search loops.
void stream_sinrs_from_cols(int n_ue, int rank, const cx* const* cols, double noise_var,
                            double* out) {
    std::array<cx, 16> t{};
    const double inv_nv = 1.0 / noise_var;
    for (int a = 0; a < rank; ++a)
        for (int b = a; b < rank; ++b) {
            cx s = 0.0;
            for (int i = 0; i < n_ue; ++i) s += std::conj(cols[a][i]) * cols[b][i];
            const cx v = s * inv_nv + (a == b ? 1.0 : 0.0);
            t[static_cast<size_t>(b * rank + a)] = v;          // (row a, col b)
            t[static_cast<size_t>(a * rank + b)] = std::conj(v);  // (row b, col a)
        }
    std::array<double, 4> diag;
    if (!inverse_diagonal_hpd(rank, t.data(), diag.data())) {
        for (int k = 0; k < rank; ++k) out[k] = 0.0;
        return;
    }
    for (int k = 0; k < rank; ++k)
        out[k] = std::max(0.0, 1.0 / diag[static_cast<size_t>(k)] - 1.0);
}

// Per-polarization projections of every RB onto every grid column.
struct GridProjections {
    std::vector<arma::cx_mat> p0, p1;  // each n_ue x n_grid_cols
};

GridProjections project_onto_grid(const ChannelRealization& h, const DftBeamGrid& grid) {
    const int half = grid.config.n1 * grid.config.n2;
    GridProjections pr;
    pr.p0.reserve(h.per_rb.size());
    pr.p1.reserve(h.per_rb.size());
    for (const auto& h_rb : h.per_rb) {
        pr.p0.push_back(h_rb.cols(0, half - 1) * grid.columns);
        pr.p1.push_back(h_rb.cols(half, 2 * half - 1) * grid.columns);
    }
    return pr;
}

// Absolute-plus-relative window treating fp-level SE differences as ties.
double se_tie_tol(double reference) { return 1e-9 * (1.0 + std::abs(reference)); }

std::vector<std::pair<int, int>> subband_rb_ranges(int n_rb, int n_sb) {
    std::vector<std::pair<int, int>> ranges(static_cast<size_t>(n_sb), {0, 0});
    for (int sb = 0; sb < n_sb; ++sb) {
        int lo = n_rb, hi = 0;
        for (int rb = 0; rb < n_rb; ++rb)
            if (subband_of_rb(rb, n_rb, n_sb) == sb) {
                lo = std::min(lo, rb);
                hi = std::max(hi, rb + 1);
            }
        ranges[static_cast<size_t>(sb)] = {std::min(lo, hi), hi};
    }
    return ranges;
}

void normalize_columns(arma::cx_mat& f) {
    const double target = 1.0 / std::sqrt(static_cast<double>(f.n_cols));
    for (arma::uword c = 0; c < f.n_cols; ++c) {
        const double nrm = arma::norm(f.col(c));
        if (nrm > 1e-300) f.col(c) *= target / nrm;
    }
}

PrecoderSet expand_subband_precoders(const std::vector<arma::cx_mat>& per_sb, int n_rb, int rank,
                                     CodebookChoice source, const arma::cx_mat* w_csi) {
    const int n_sb = static_cast<int>(per_sb.size());
    PrecoderSet set;
    set.rank = rank;
    set.source = source;
    set.per_rb.reserve(static_cast<size_t>(n_rb));
    std::vector<arma::cx_mat> composed(per_sb.size());
    for (size_t sb = 0; sb < per_sb.size(); ++sb) {
        composed[sb] = w_csi ? arma::cx_mat(*w_csi * per_sb[sb]) : per_sb[sb];
        normalize_columns(composed[sb]);
    }
    for (int rb = 0; rb < n_rb; ++rb)
        set.per_rb.push_back(composed[static_cast<size_t>(subband_of_rb(rb, n_rb, n_sb))]);
    return set;
}

}  // namespace

arma::cx_mat csi_rs_precoder(int n_ports) {
    if (n_ports < 1) throw Error("n_ports must be >= 1");
    return arma::eye<arma::cx_mat>(static_cast<arma::uword>(n_ports),
                                   static_cast<arma::uword>(n_ports));
}

PrecoderSet build_precoder_set(const TypeIPmi& pmi, const DftBeamGrid& grid, int n_rb,
                               const arma::cx_mat* w_csi) {
    std::vector<arma::cx_mat> per_sb;
    per_sb.reserve(static_cast<size_t>(grid.config.n_subbands));
    for (int sb = 0; sb < grid.config.n_subbands; ++sb)
        per_sb.push_back(build_type1_precoder(pmi, grid, sb));
    return expand_subband_precoders(per_sb, n_rb, pmi.rank, CodebookChoice::type1, w_csi);
}

PrecoderSet build_precoder_set(const ETypeIIPmi& pmi, const DftBeamGrid& grid,
                               const CodebookConfig& config, int n_rb,
                               const arma::cx_mat* w_csi) {
    ETypeIIPrecoder built = build_etype2_precoder(pmi, grid, config);
    return expand_subband_precoders(built.per_subband, n_rb, pmi.rank, CodebookChoice::etype2,
                                    w_csi);
}

arma::cx_mat mmse_irc_equalizer(const arma::cx_mat& h_eff, double noise_var) {
    if (!(noise_var > 0.0)) throw Error("mmse_irc_equalizer requires noise_var > 0");
    arma::cx_mat cov = h_eff * h_eff.t();
    cov.diag() += noise_var;
    arma::cx_mat cov_inv;
    if (!arma::inv_sympd(cov_inv, cov)) cov_inv = arma::inv(cov);
    return h_eff.t() * cov_inv;
}

double sinr(const arma::cx_rowvec& g_row, const arma::cx_mat& h, const arma::cx_mat& f,
            int stream, double noise_var) {
    const arma::cx_rowvec gh = g_row * h;
    double interference = 0.0;
    double signal = 0.0;
    for (int j = 0; j < static_cast<int>(f.n_cols); ++j) {
        const double p = std::norm(arma::cx_double(arma::as_scalar(gh * f.col(j))));
        if (j == stream)
            signal = p;
        else
            interference += p;
    }
    const double denom = interference + std::pow(arma::norm(g_row), 2) * noise_var;
    return signal / denom;
}

LinkMetrics spectral_efficiency(const ChannelRealization& h, const PrecoderSet& precoders,
                                double noise_var) {
    const int n_rb = h.n_rb();
    if (static_cast<int>(precoders.per_rb.size()) != n_rb)
        throw Error("precoder set does not cover the realization");
    LinkMetrics m;
    m.noise_var = noise_var;
    m.sinr.set_size(static_cast<arma::uword>(n_rb), static_cast<arma::uword>(precoders.rank));
    double se = 0.0;
    for (int rb = 0; rb < n_rb; ++rb) {
        const arma::cx_mat& f = precoders.per_rb[static_cast<size_t>(rb)];
        const arma::cx_mat h_eff = h.per_rb[static_cast<size_t>(rb)] * f;
        const arma::cx_mat g = mmse_irc_equalizer(h_eff, noise_var);
        for (int r = 0; r < precoders.rank; ++r) {
            const double s = sinr(g.row(static_cast<arma::uword>(r)),
                                  h.per_rb[static_cast<size_t>(rb)], f, r, noise_var);
            m.sinr(static_cast<arma::uword>(rb), static_cast<arma::uword>(r)) = s;
            se += std::log1p(std::max(0.0, s)) * kInvLn2;
        }
    }
    m.se_bits_per_use = se;
    const double mean_sinr = arma::accu(m.sinr) / static_cast<double>(m.sinr.n_elem);
    m.cqi = mean_sinr > 0.0 ? cqi_from_sinr(10.0 * std::log10(mean_sinr)) : 0;
    return m;
}

int cqi_from_sinr(double mean_sinr_db) {
    const int idx = static_cast<int>(std::floor((mean_sinr_db + 6.0) / 2.0));
    return std::clamp(idx, 0, 15);
}

std::pair<TypeIPmi, LinkMetrics> select_type1_pmi(const ChannelRealization& h,
                                                  const DftBeamGrid& grid,
                                                  const CodebookConfig& config, double noise_var) {
    const int n_rb = h.n_rb();
    const int n_ue = h.n_ue();
    const int n_sb = config.n_subbands;
    const GridProjections proj = project_onto_grid(h, grid);
    const auto sb_ranges = subband_rb_ranges(n_rb, n_sb);

    double best_se = -1.0;
    int best_rank = 1, best_i11 = 0, best_i12 = 0;
    std::vector<uint8_t> best_cophase;

    std::vector<cx> y(static_cast<size_t>(n_ue) * 4);
    std::array<const cx*, 4> ycols{};
    for (int r = 0; r < 4; ++r) ycols[static_cast<size_t>(r)] = y.data() + r * n_ue;

    for (int i11 = 0; i11 < grid.extent1(); ++i11) {
        for (int i12 = 0; i12 < grid.extent2(); ++i12) {
            std::array<int, 4> cols{};
            for (int layer = 0; layer < 4; ++layer) {
                auto [k1, k2] = type1_layer_offset(config, layer);
                cols[static_cast<size_t>(layer)] = grid.col_index(i11 + k1, i12 + k2);
            }
            for (int rank = 1; rank <= config.max_rank; ++rank) {
                const double scale = 1.0 / std::sqrt(2.0 * rank);
                double se_total = 0.0;
                std::vector<uint8_t> cophase(static_cast<size_t>(n_sb), 0);
                for (int sb = 0; sb < n_sb; ++sb) {
                    double best_sb = -1.0;
                    uint8_t best_c = 0;
                    for (uint8_t c = 0; c < 4; c = static_cast<uint8_t>(c + (rank == 1 ? 1 : 2))) {
                        const cx phase = std::polar(1.0, kTwoPi * c / 4.0);
                        double se_sb = 0.0;
                        for (int rb = sb_ranges[static_cast<size_t>(sb)].first;
                             rb < sb_ranges[static_cast<size_t>(sb)].second; ++rb) {
                            const auto& p0 = proj.p0[static_cast<size_t>(rb)];
                            const auto& p1 = proj.p1[static_cast<size_t>(rb)];
                            for (int k = 0; k < rank; ++k) {
                                const cx* a = p0.colptr(static_cast<arma::uword>(
                                    cols[static_cast<size_t>(k)]));
                                const cx* b = p1.colptr(static_cast<arma::uword>(
                                    cols[static_cast<size_t>(k)]));
                                cx* dst = y.data() + k * n_ue;
                                for (int i = 0; i < n_ue; ++i)
                                    dst[i] = scale * (a[i] + phase * b[i]);
                            }
                            std::array<double, 4> sinrs;
                            stream_sinrs_from_cols(n_ue, rank, ycols.data(), noise_var,
                                                   sinrs.data());
                            for (int k = 0; k < rank; ++k)
                                se_sb += std::log1p(sinrs[static_cast<size_t>(k)]) * kInvLn2;
                        }
                        // ties within fp noise keep the lower co-phase index
                        if (se_sb > best_sb + se_tie_tol(best_sb)) {
                            best_sb = se_sb;
                            best_c = c;
                        }
                    }
                    se_total += std::max(0.0, best_sb);
                    cophase[static_cast<size_t>(sb)] = best_c;
                }
                // wrap-around offsets make some hypotheses exactly equivalent
                // (same beam pair, swapped layers); resolve those ties by
                // (rank, i11, i12) regardless of last-bit noise
                const double tol = se_tie_tol(best_se);
                const bool better =
                    se_total > best_se + tol ||
                    (se_total >= best_se - tol &&
                     std::tuple(rank, i11, i12) < std::tuple(best_rank, best_i11, best_i12));
                if (better) {
                    best_se = std::max(best_se, se_total);
                    best_rank = rank;
                    best_i11 = i11;
                    best_i12 = i12;
                    best_cophase = cophase;
                }
            }
        }
    }

    TypeIPmi pmi;
    pmi.i11 = best_i11;
    pmi.i12 = best_i12;
    pmi.rank = best_rank;
    pmi.cophase = best_cophase;
    LinkMetrics metrics = spectral_efficiency(h, build_precoder_set(pmi, grid, n_rb), noise_var);
    return {std::move(pmi), std::move(metrics)};
}

namespace {

// Quantizes one layer's compressed coefficient matrix (2L x M), keeps the
// K_nz largest magnitudes and normalizes to the strongest coefficient.
ETypeIILayer quantize_layer(const arma::cx_mat& compressed, const std::vector<int>& basis_set,
                            int k_nz, const CodebookConfig& config) {
    const int rows = static_cast<int>(compressed.n_rows);
    const int m = static_cast<int>(compressed.n_cols);

    struct Entry {
        double mag;
        int row, col;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<size_t>(rows * m));
    for (int row = 0; row < rows; ++row)
        for (int col = 0; col < m; ++col)
            entries.push_back({std::abs(compressed(static_cast<arma::uword>(row),
                                                   static_cast<arma::uword>(col))),
                               row, col});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.mag != b.mag) return a.mag > b.mag;
        return std::tuple(a.row, a.col) < std::tuple(b.row, b.col);
    });
    const int keep = std::min<int>(k_nz, static_cast<int>(entries.size()));

    ETypeIILayer layer;
    layer.basis_set = basis_set;
    layer.strongest_row = entries.empty() ? 0 : entries.front().row;
    arma::cx_double strongest =
        entries.empty() ? arma::cx_double(1.0)
                        : compressed(static_cast<arma::uword>(entries.front().row),
                                     static_cast<arma::uword>(entries.front().col));
    const bool degenerate_scale = std::abs(strongest) < 1e-300;

    std::vector<Entry> kept(entries.begin(), entries.begin() + keep);
    std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
        return std::tuple(a.row, a.col) < std::tuple(b.row, b.col);
    });
    for (const auto& e : kept) {
        ETypeIICoeff c;
        c.row = e.row;
        c.col = e.col;
        if (degenerate_scale) {
            c.amp_index = (e.row == entries.front().row && e.col == entries.front().col)
                              ? 0
                              : uint8_t((1u << config.amp_bits) - 1);
            c.phase_index = 0;
        } else {
            const arma::cx_double v = compressed(static_cast<arma::uword>(e.row),
                                                 static_cast<arma::uword>(e.col)) /
                                      strongest;
            const double a = std::abs(v);
            c.amp_index = a <= 0.0 ? uint8_t((1u << config.amp_bits) - 1)
                                   : uint8_t(std::clamp<long long>(
                                         std::llround(-2.0 * std::log2(a)), 0,
                                         (1 << config.amp_bits) - 1));
            const int n_ph = 1 << config.phase_bits;
            const long long p = std::llround(std::arg(v) / (kTwoPi / n_ph));
            c.phase_index = uint8_t(((p % n_ph) + n_ph) % n_ph);
        }
        layer.coeffs.push_back(c);
    }
    return layer;
}

}  // namespace

std::pair<ETypeIIPmi, LinkMetrics> select_etype2_pmi(const ChannelRealization& h,
                                                     const DftBeamGrid& grid,
                                                     const CodebookConfig& config,
                                                     double noise_var) {
    const int n_rb = h.n_rb();
    const int n_ue = h.n_ue();
    const int n_sb = config.n_subbands;
    const int big_l = config.l_beams;
    const int n_beams = config.n1 * config.n2;
    const int half = n_beams;
    const GridProjections proj = project_onto_grid(h, grid);
    const auto sb_ranges = subband_rb_ranges(n_rb, n_sb);

    // Stage 1: rotation and beam set maximizing projected power. Rotations
    // whose orthogonal bases capture the same total (fp-level ties) prefer
    // the one concentrating more power in its strongest beam, then the
    // lower rotation index.
    double best_power = -1.0;
    double best_top1 = -1.0;
    int best_q1 = 0, best_q2 = 0;
    std::vector<int> best_beams;
    for (int q1 = 0; q1 < config.o1; ++q1)
        for (int q2 = 0; q2 < config.o2; ++q2) {
            std::vector<std::pair<double, int>> pw(static_cast<size_t>(n_beams));
            for (int x = 0; x < n_beams; ++x) {
                const int col = grid.col_index(q1 + config.o1 * (x / config.n2),
                                               q2 + config.o2 * (x % config.n2));
                double p = 0.0;
                for (int rb = 0; rb < n_rb; ++rb) {
                    p += std::pow(arma::norm(proj.p0[static_cast<size_t>(rb)].col(
                             static_cast<arma::uword>(col))), 2);
                    p += std::pow(arma::norm(proj.p1[static_cast<size_t>(rb)].col(
                             static_cast<arma::uword>(col))), 2);
                }
                pw[static_cast<size_t>(x)] = {p, x};
            }
            std::sort(pw.begin(), pw.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            double score = 0.0;
            for (int l = 0; l < big_l; ++l) score += pw[static_cast<size_t>(l)].first;
            const double top1 = pw.front().first;
            const double tol = se_tie_tol(best_power);
            const bool better = score > best_power + tol ||
                                (score >= best_power - tol && top1 > best_top1 + tol);
            if (better) {
                best_power = std::max(best_power, score);
                best_top1 = top1;
                best_q1 = q1;
                best_q2 = q2;
                best_beams.clear();
                for (int l = 0; l < big_l; ++l)
                    best_beams.push_back(pw[static_cast<size_t>(l)].second);
            }
        }
    std::sort(best_beams.begin(), best_beams.end());

    // Rotated beam matrix for projections.
    arma::cx_mat beams(static_cast<arma::uword>(half), static_cast<arma::uword>(big_l));
    for (int l = 0; l < big_l; ++l) {
        const int x = best_beams[static_cast<size_t>(l)];
        beams.col(static_cast<arma::uword>(l)) =
            grid.beam(best_q1 + config.o1 * (x / config.n2), best_q2 + config.o2 * (x % config.n2));
    }

    // Stage 2: per-subband layer targets in beam space, for up to max_rank layers.
    const int max_layers = std::min(config.max_rank, std::min(n_ue, 2 * big_l));
    std::vector<arma::cx_mat> layer_coeffs(static_cast<size_t>(max_layers));
    for (auto& lc : layer_coeffs)
        lc.zeros(static_cast<arma::uword>(2 * big_l), static_cast<arma::uword>(n_sb));
    for (int sb = 0; sb < n_sb; ++sb) {
        const auto [lo, hi] = sb_ranges[static_cast<size_t>(sb)];
        if (lo >= hi) continue;
        arma::cx_mat stacked(static_cast<arma::uword>((hi - lo) * n_ue),
                             static_cast<arma::uword>(h.n_ports()));
        for (int rb = lo; rb < hi; ++rb)
            stacked.rows(static_cast<arma::uword>((rb - lo) * n_ue),
                         static_cast<arma::uword>((rb - lo + 1) * n_ue - 1)) =
                h.per_rb[static_cast<size_t>(rb)];
        arma::cx_mat u, v;
        arma::vec s;
        arma::svd_econ(u, s, v, stacked);
        for (int l = 0; l < max_layers && l < static_cast<int>(v.n_cols); ++l) {
            const arma::cx_vec target = v.col(static_cast<arma::uword>(l));
            layer_coeffs[static_cast<size_t>(l)]
                .col(static_cast<arma::uword>(sb))
                .rows(0, static_cast<arma::uword>(big_l - 1)) =
                beams.t() * target.head(static_cast<arma::uword>(half));
            layer_coeffs[static_cast<size_t>(l)]
                .col(static_cast<arma::uword>(sb))
                .rows(static_cast<arma::uword>(big_l), static_cast<arma::uword>(2 * big_l - 1)) =
                beams.t() * target.tail(static_cast<arma::uword>(half));
        }
    }

    // Phase alignment across subbands: make the strongest beam row real-positive.
    for (auto& lc : layer_coeffs) {
        arma::vec row_power = arma::sum(arma::square(arma::abs(lc)), 1);
        const arma::uword r_star = row_power.index_max();
        for (int sb = 0; sb < n_sb; ++sb) {
            const arma::cx_double pivot = lc(r_star, static_cast<arma::uword>(sb));
            if (std::abs(pivot) > 1e-15)
                lc.col(static_cast<arma::uword>(sb)) *= std::polar(1.0, -std::arg(pivot));
        }
    }

    // Stage 3: per rank, frequency compression, quantization, SE-based choice.
    double best_se = -1.0;
    ETypeIIPmi best_pmi;
    LinkMetrics best_metrics;
    for (int rank = 1; rank <= max_layers; ++rank) {
        const int m = config.m_bases(rank);
        const int k_nz = config.k_nz_per_layer(rank);

        // DFT across subbands per layer; shared basis energies over layers.
        std::vector<arma::cx_mat> fd(static_cast<size_t>(rank));
        arma::vec basis_energy(static_cast<arma::uword>(n_sb), arma::fill::zeros);
        for (int l = 0; l < rank; ++l) {
            fd[static_cast<size_t>(l)].zeros(static_cast<arma::uword>(2 * big_l),
                                             static_cast<arma::uword>(n_sb));
            for (int k = 0; k < n_sb; ++k) {
                arma::cx_vec acc(static_cast<arma::uword>(2 * big_l), arma::fill::zeros);
                for (int sb = 0; sb < n_sb; ++sb)
                    acc += layer_coeffs[static_cast<size_t>(l)].col(static_cast<arma::uword>(sb)) *
                           std::polar(1.0, -kTwoPi * k * sb / n_sb);
                fd[static_cast<size_t>(l)].col(static_cast<arma::uword>(k)) = acc;
                basis_energy(static_cast<arma::uword>(k)) += std::pow(arma::norm(acc), 2);
            }
        }
        std::vector<int> order(static_cast<size_t>(n_sb));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double ea = basis_energy(static_cast<arma::uword>(a));
            const double eb = basis_energy(static_cast<arma::uword>(b));
            if (ea != eb) return ea > eb;
            return a < b;
        });
        std::vector<int> basis_set(order.begin(), order.begin() + m);
        std::sort(basis_set.begin(), basis_set.end());

        ETypeIIPmi pmi;
        pmi.beam_set = best_beams;
        pmi.q1 = best_q1;
        pmi.q2 = best_q2;
        pmi.rank = rank;
        for (int l = 0; l < rank; ++l) {
            arma::cx_mat compressed(static_cast<arma::uword>(2 * big_l),
                                    static_cast<arma::uword>(m));
            for (int i = 0; i < m; ++i)
                compressed.col(static_cast<arma::uword>(i)) =
                    fd[static_cast<size_t>(l)].col(static_cast<arma::uword>(basis_set[static_cast<size_t>(i)]));
            pmi.layers.push_back(quantize_layer(compressed, basis_set, k_nz, config));
        }

        LinkMetrics metrics =
            spectral_efficiency(h, build_precoder_set(pmi, grid, config, n_rb), noise_var);
        if (metrics.se_bits_per_use > best_se) {
            best_se = metrics.se_bits_per_use;
            best_pmi = std::move(pmi);
            best_metrics = std::move(metrics);
        }
    }
    return {std::move(best_pmi), std::move(best_metrics)};
}

LinkMetrics mismatched_se(const ChannelRealization& h_now, const Pmi& stale_pmi,
                          const DftBeamGrid& grid, const CodebookConfig& config,
                          double noise_var) {
    return std::visit(
        [&](const auto& pmi) {
            using T = std::decay_t<decltype(pmi)>;
            if constexpr (std::is_same_v<T, TypeIPmi>)
                return spectral_efficiency(h_now, build_precoder_set(pmi, grid, h_now.n_rb()),
                                           noise_var);
            else
                return spectral_efficiency(
                    h_now, build_precoder_set(pmi, grid, config, h_now.n_rb()), noise_var);
        },
        stale_pmi);
}

namespace detail {

arma::vec mmse_stream_sinrs(const arma::cx_mat& h_eff, double noise_var) {
    const int rank = static_cast<int>(h_eff.n_cols);
    const int n_ue = static_cast<int>(h_eff.n_rows);
    if (rank > 4) throw Error("mmse_stream_sinrs supports rank <= 4");
    std::array<const cx*, 4> cols{};
    for (int r = 0; r < rank; ++r) cols[static_cast<size_t>(r)] = h_eff.colptr(static_cast<arma::uword>(r));
    arma::vec out(static_cast<arma::uword>(rank));
    std::array<double, 4> sinrs;
    stream_sinrs_from_cols(n_ue, rank, cols.data(), noise_var, sinrs.data());
    for (int r = 0; r < rank; ++r) out(static_cast<arma::uword>(r)) = sinrs[static_cast<size_t>(r)];
    return out;
}

}  // namespace detail

}  // namespace nrcba
