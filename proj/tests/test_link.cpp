// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "nrcba/channel.hpp"
#include "nrcba/link.hpp"
#include "nrcba/rng.hpp"

using namespace nrcba;

namespace {

constexpr double kPi = std::numbers::pi;

CodebookConfig paper_cfg() { return CodebookConfig{}; }

CodebookConfig tiny_cfg() {
    CodebookConfig cfg;
    cfg.n1 = 2;
    cfg.n2 = 1;
    cfg.o1 = 2;
    cfg.o2 = 1;
    cfg.l_beams = 1;
    cfg.m_bases_low_rank = 1;
    cfg.m_bases_high_rank = 1;
    cfg.n_subbands = 2;
    cfg.max_rank = 2;
    return cfg;
}

ChannelRealization manual_channel(std::vector<arma::cx_mat> per_rb) {
    ChannelRealization h;
    h.per_rb = std::move(per_rb);
    h.profile_label = "manual";
    return h;
}

// Rank-1 channel aligned with one stacked grid beam across polarizations.
ChannelRealization beam_aligned_channel(const DftBeamGrid& grid, int i1, int i2, int n_ue,
                                        int n_rb, double pol_phase = 0.0) {
    const arma::cx_vec b = grid.beam(i1, i2);
    const int half = static_cast<int>(b.n_elem);
    arma::cx_vec a_tx(static_cast<arma::uword>(2 * half));
    a_tx.head(static_cast<arma::uword>(half)) = b;
    a_tx.tail(static_cast<arma::uword>(half)) = std::polar(1.0, pol_phase) * b;
    arma::cx_vec u(static_cast<arma::uword>(n_ue));
    for (int i = 0; i < n_ue; ++i) u(static_cast<arma::uword>(i)) = std::polar(1.0, 0.37 * i);
    std::vector<arma::cx_mat> per_rb(static_cast<size_t>(n_rb), arma::cx_mat(u * a_tx.t()));
    return manual_channel(std::move(per_rb));
}

// Full enumeration of the Type I hypothesis space through the contract
// path (build_type1_precoder + mmse_irc_equalizer + sinr).
struct OracleBest {
    double se = -1.0;
    TypeIPmi pmi;
};

double subband_se_direct(const ChannelRealization& h, const TypeIPmi& pmi,
                         const DftBeamGrid& grid, int sb, double noise_var) {
    const int n_rb = h.n_rb();
    const int n_sb = grid.config.n_subbands;
    const arma::cx_mat w = build_type1_precoder(pmi, grid, sb);
    double se = 0.0;
    for (int rb = 0; rb < n_rb; ++rb) {
        if (subband_of_rb(rb, n_rb, n_sb) != sb) continue;
        const arma::cx_mat h_eff = h.per_rb[static_cast<size_t>(rb)] * w;
        const arma::cx_mat g = mmse_irc_equalizer(h_eff, noise_var);
        for (int r = 0; r < pmi.rank; ++r)
            se += std::log2(1.0 + sinr(g.row(static_cast<arma::uword>(r)),
                                       h.per_rb[static_cast<size_t>(rb)], w, r, noise_var));
    }
    return se;
}

// Same fp-noise tie window the search uses: equal-SE hypotheses resolve
// by (rank, i11, i12), co-phase ties by the lower index.
double tie_tol(double reference) { return 1e-9 * (1.0 + std::abs(reference)); }

OracleBest exhaustive_type1_oracle(const ChannelRealization& h, const DftBeamGrid& grid,
                                   const CodebookConfig& cfg, double noise_var) {
    OracleBest best;
    for (int i11 = 0; i11 < cfg.n1 * cfg.o1; ++i11)
        for (int i12 = 0; i12 < cfg.n2 * cfg.o2; ++i12)
            for (int rank = 1; rank <= cfg.max_rank; ++rank) {
                TypeIPmi pmi;
                pmi.i11 = i11;
                pmi.i12 = i12;
                pmi.rank = rank;
                pmi.cophase.assign(static_cast<size_t>(cfg.n_subbands), 0);
                double total = 0.0;
                for (int sb = 0; sb < cfg.n_subbands; ++sb) {
                    double best_sb = -1.0;
                    uint8_t best_c = 0;
                    for (uint8_t c = 0; c < 4; c = uint8_t(c + (rank == 1 ? 1 : 2))) {
                        TypeIPmi probe = pmi;
                        probe.cophase[static_cast<size_t>(sb)] = c;
                        const double se = subband_se_direct(h, probe, grid, sb, noise_var);
                        if (se > best_sb + tie_tol(best_sb)) {
                            best_sb = se;
                            best_c = c;
                        }
                    }
                    pmi.cophase[static_cast<size_t>(sb)] = best_c;
                    total += best_sb;
                }
                const double tol = tie_tol(best.se);
                const bool better =
                    total > best.se + tol ||
                    (total >= best.se - tol &&
                     std::tuple(rank, i11, i12) <
                         std::tuple(best.pmi.rank, best.pmi.i11, best.pmi.i12));
                if (better) {
                    best.se = std::max(best.se, total);
                    best.pmi = pmi;
                }
            }
    return best;
}

}  // namespace

TEST_CASE("csi_rs_precoder: identity default and unit-power composition") {
    const arma::cx_mat w_csi = csi_rs_precoder(4);
    CHECK(arma::abs(w_csi - arma::eye<arma::cx_mat>(4, 4)).max() == 0.0);

    CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    TypeIPmi pmi;
    pmi.i11 = 1;
    pmi.i12 = 0;
    pmi.rank = 2;
    pmi.cophase = {0, 2};
    const PrecoderSet plain = build_precoder_set(pmi, grid, 4);
    const arma::cx_mat eye = csi_rs_precoder(cfg.n_ports());
    const PrecoderSet composed = build_precoder_set(pmi, grid, 4, &eye);
    for (size_t rb = 0; rb < plain.per_rb.size(); ++rb)
        CHECK(arma::abs(plain.per_rb[rb] - composed.per_rb[rb]).max() < 1e-12);

    // non-identity wideband override keeps unit column power after renorm
    arma::cx_mat dft(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            dft(static_cast<arma::uword>(a), static_cast<arma::uword>(b)) =
                std::polar(0.5, 2.0 * kPi * a * b / 4.0);
    const PrecoderSet overridden = build_precoder_set(pmi, grid, 4, &dft);
    for (const auto& f : overridden.per_rb)
        for (arma::uword c = 0; c < f.n_cols; ++c)
            CHECK(std::abs(arma::norm(f.col(c)) - 1.0 / std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("mmse_irc_equalizer: closed forms and zero-forcing limit") {
    const arma::cx_mat eye2 = arma::eye<arma::cx_mat>(2, 2);
    const arma::cx_mat g = mmse_irc_equalizer(eye2, 1.0);
    CHECK(arma::abs(g - 0.5 * eye2).max() < 1e-12);

    arma::cx_mat h1(1, 1);
    h1(0, 0) = 2.0;
    CHECK(std::abs(mmse_irc_equalizer(h1, 1.0)(0, 0) - arma::cx_double(0.4)) < 1e-12);

    arma::cx_mat hsq(2, 2);
    hsq(0, 0) = {1.0, 0.2};
    hsq(0, 1) = {-0.3, 0.1};
    hsq(1, 0) = {0.5, -0.7};
    hsq(1, 1) = {0.9, 0.4};
    const arma::cx_mat gzf = mmse_irc_equalizer(hsq, 1e-12);
    CHECK(arma::abs(gzf * hsq - eye2).max() < 1e-6);

    CHECK_THROWS_AS(mmse_irc_equalizer(eye2, 0.0), Error);
}

TEST_CASE("sinr: scalar cases and explicit interference accounting") {
    arma::cx_rowvec g1(1);
    g1(0) = 1.0;
    arma::cx_mat h1(1, 1), f1(1, 1);
    h1(0, 0) = 1.0;
    f1(0, 0) = 1.0;
    CHECK(std::abs(sinr(g1, h1, f1, 0, 0.1) - 10.0) < 1e-12);

    arma::cx_rowvec g2(2, arma::fill::zeros);
    g2(0) = 1.0;
    const arma::cx_mat eye2 = arma::eye<arma::cx_mat>(2, 2);
    CHECK(std::abs(sinr(g2, eye2, eye2, 0, 0.5) - 2.0) < 1e-12);

    arma::cx_mat f(2, 2, arma::fill::zeros);
    f(0, 0) = 1.0;
    f(0, 1) = 1.0 / std::sqrt(2.0);
    f(1, 1) = 1.0 / std::sqrt(2.0);
    const double expect = std::norm(f(0, 0)) / (std::norm(f(0, 1)) + 0.5);
    CHECK(std::abs(sinr(g2, eye2, f, 0, 0.5) - expect) < 1e-12);
}

TEST_CASE("mmse stream-SINR identity matches the direct Eq-route") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int n_ue = 2 + static_cast<int>(rng.below(3));
        const int rank = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(std::min(n_ue, 4))));
        arma::cx_mat h_eff(static_cast<arma::uword>(n_ue), static_cast<arma::uword>(rank));
        for (auto& v : h_eff) v = arma::cx_double(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const double noise_var = 0.01 + rng.uniform() * 2.0;

        const arma::vec fast = detail::mmse_stream_sinrs(h_eff, noise_var);
        const arma::cx_mat g = mmse_irc_equalizer(h_eff, noise_var);
        for (int r = 0; r < rank; ++r) {
            // identity channel: h_eff already includes H * F
            const double direct = sinr(g.row(static_cast<arma::uword>(r)),
                                       arma::eye<arma::cx_mat>(static_cast<arma::uword>(n_ue),
                                                               static_cast<arma::uword>(n_ue)),
                                       h_eff, r, noise_var);
            CHECK(std::abs(fast(static_cast<arma::uword>(r)) - direct) <
                  1e-9 * std::max(1.0, direct));
        }
    }
}

TEST_CASE("spectral_efficiency: exact values on crafted instances") {
    PrecoderSet p;
    p.rank = 1;
    p.per_rb = {arma::cx_mat(1, 1, arma::fill::ones)};
    ChannelRealization h = manual_channel({arma::cx_mat(1, 1, arma::fill::ones)});
    const LinkMetrics m = spectral_efficiency(h, p, 1.0);
    CHECK(std::abs(m.se_bits_per_use - 1.0) < 1e-12);  // log2(1 + 1)
    CHECK(m.sinr(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    PrecoderSet p2 = p;
    p2.per_rb.push_back(p.per_rb[0]);
    ChannelRealization h2 = manual_channel({h.per_rb[0], h.per_rb[0]});
    CHECK(std::abs(spectral_efficiency(h2, p2, 1.0).se_bits_per_use - 2.0) < 1e-12);

    ChannelRealization hz = manual_channel({arma::cx_mat(1, 1, arma::fill::zeros)});
    CHECK(spectral_efficiency(hz, p, 1.0).se_bits_per_use == 0.0);
}

TEST_CASE("spectral efficiency is non-increasing in noise variance") {
    const CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    const ChannelProfile prof = make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, 21);
    const ChannelRealization h = realize(prof, 4, 2, geom, 0.0, 5);
    TypeIPmi pmi;
    pmi.i11 = 1;
    pmi.i12 = 0;
    pmi.rank = 2;
    pmi.cophase = {0, 2};
    const PrecoderSet f = build_precoder_set(pmi, grid, 4);
    double prev = 1e300;
    for (double nv : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}) {
        const double se = spectral_efficiency(h, f, nv).se_bits_per_use;
        CHECK(se <= prev + 1e-12);
        prev = se;
    }
}

TEST_CASE("cqi staircase: saturation, thresholds, monotonicity") {
    CHECK(cqi_from_sinr(-10.0) == 0);
    CHECK(cqi_from_sinr(30.0) == 15);
    CHECK(cqi_from_sinr(0.0) == 3);
    int prev = 0;
    for (double db = -12.0; db <= 32.0; db += 0.25) {
        const int c = cqi_from_sinr(db);
        CHECK(c >= prev);
        CHECK(c >= 0);
        CHECK(c <= 15);
        prev = c;
    }
}

TEST_CASE("select_type1_pmi matches the exhaustive contract-path oracle") {
    const CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    for (uint64_t seed = 0; seed < 6; ++seed) {
        const ChannelProfile prof = make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, seed);
        const ChannelRealization h = realize(prof, 4, 2, geom, 0.0, seed + 100);
        const double noise_var = 0.1;
        const auto [pmi, metrics] = select_type1_pmi(h, grid, cfg, noise_var);
        const OracleBest oracle = exhaustive_type1_oracle(h, grid, cfg, noise_var);
        CHECK(metrics.se_bits_per_use == doctest::Approx(oracle.se).epsilon(1e-9));
        CHECK(pmi == oracle.pmi);
    }
}

TEST_CASE("select_type1_pmi: beam-aligned channel recovers the planted beam") {
    const CodebookConfig cfg = paper_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ChannelRealization h = beam_aligned_channel(grid, 4, 0, 4, 26);
    const auto [pmi, metrics] = select_type1_pmi(h, grid, cfg, 0.1);
    CHECK(pmi.i11 == 4);
    CHECK(pmi.i12 == 0);
    CHECK(pmi.rank == 1);
    // frequency-flat channel: every subband picks the same co-phase
    for (uint8_t c : pmi.cophase) CHECK(c == pmi.cophase.front());
    CHECK(metrics.se_bits_per_use > 0.0);
}

TEST_CASE("select_type1_pmi: infinite noise falls back to rank 1 by tie-break") {
    const CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    const ChannelProfile prof = make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, 3);
    const ChannelRealization h = realize(prof, 4, 2, geom, 0.0, 9);
    const auto [pmi, metrics] = select_type1_pmi(h, grid, cfg, 1e300);
    CHECK(pmi.rank == 1);
    CHECK(metrics.se_bits_per_use == 0.0);
}

TEST_CASE("searched Type I PMI dominates random PMIs") {
    const CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    Rng rng(55);
    for (uint64_t seed = 0; seed < 5; ++seed) {
        const ChannelProfile prof = make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, seed);
        const ChannelRealization h = realize(prof, 6, 2, geom, 0.0, seed + 40);
        const auto [pmi, metrics] = select_type1_pmi(h, grid, cfg, 0.1);
        for (int trial = 0; trial < 100; ++trial) {
            TypeIPmi rand_pmi;
            rand_pmi.rank = 1 + static_cast<int>(rng.below(2));
            rand_pmi.i11 = static_cast<int>(rng.below(4));
            rand_pmi.i12 = 0;
            for (int sb = 0; sb < cfg.n_subbands; ++sb)
                rand_pmi.cophase.push_back(rand_pmi.rank == 1 ? uint8_t(rng.below(4))
                                                              : uint8_t(2 * rng.below(2)));
            const double se =
                spectral_efficiency(h, build_precoder_set(rand_pmi, grid, 6), 0.1).se_bits_per_use;
            CHECK(metrics.se_bits_per_use >= se - 1e-9);
        }
    }
}

TEST_CASE("select_etype2_pmi: planted beam joins the beam set with the strongest coefficient") {
    const CodebookConfig cfg = paper_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    // plant grid column (4, 4) = rotation (0, 4 mod o2) + orthogonal offsets
    const ChannelRealization h = beam_aligned_channel(grid, 4, 4, 4, 26, 0.8);
    const auto [pmi, metrics] = select_etype2_pmi(h, grid, cfg, 0.1);
    pmi.validate(cfg);
    bool found = false;
    int planted_l = -1;
    for (int l = 0; l < cfg.l_beams; ++l) {
        const int x = pmi.beam_set[static_cast<size_t>(l)];
        const int c1 = pmi.q1 + cfg.o1 * (x / cfg.n2);
        const int c2 = pmi.q2 + cfg.o2 * (x % cfg.n2);
        if (grid.col_index(c1, c2) == grid.col_index(4, 4)) {
            found = true;
            planted_l = l;
        }
    }
    CHECK(found);
    // strongest coefficient sits on that beam's row (either polarization)
    const int row = pmi.layers.front().strongest_row;
    CHECK((row % cfg.l_beams) == planted_l);
    CHECK(metrics.se_bits_per_use > 0.0);
}

TEST_CASE("select_etype2_pmi: frequency-flat channel concentrates on the DC basis") {
    const CodebookConfig cfg = paper_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    ChannelProfile prof = make_profile(ProfileKind::nlos_rich, 0.0, 363e-9, 12);
    for (auto& c : prof.clusters) c.delay_s = 0.0;  // flat across frequency
    const ChannelRealization h = realize(prof, 26, 4, geom, 0.0, 3);
    const auto [pmi, metrics] = select_etype2_pmi(h, grid, cfg, 0.1);
    const auto& basis = pmi.layers.front().basis_set;
    CHECK(std::find(basis.begin(), basis.end(), 0) != basis.end());
    // nearly all dequantized coefficient energy lives in the DC column
    double dc = 0.0, total = 0.0;
    for (const auto& c : pmi.layers.front().coeffs) {
        const double p = std::norm(etype2_coeff_value(c));
        total += p;
        if (basis[static_cast<size_t>(c.col)] == 0) dc += p;
    }
    CHECK(dc / total > 0.9);
}

TEST_CASE("select_etype2_pmi: LoS channel shows strong coefficient concentration") {
    const CodebookConfig cfg = paper_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    const ChannelProfile prof = make_profile(ProfileKind::los_high_corr, 0.833, 363e-9, 8);
    const ChannelRealization h = realize(prof, 26, 4, geom, 0.0, 18);
    const auto [pmi, metrics] = select_etype2_pmi(h, grid, cfg, 0.1);
    std::vector<double> mags;
    for (const auto& c : pmi.layers.front().coeffs) mags.push_back(std::abs(etype2_coeff_value(c)));
    std::sort(mags.begin(), mags.end());
    const double median = mags[mags.size() / 2];
    CHECK(mags.back() >= 10.0 * median);
}

TEST_CASE("EType II beats Type I on rich scattering at 10 dB") {
    const CodebookConfig cfg = paper_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    double se1 = 0.0, se2 = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const ChannelProfile prof = make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, seed);
        const ChannelRealization h = realize(prof, 26, 4, geom, 0.0, seed + 500);
        se1 += select_type1_pmi(h, grid, cfg, 0.1).second.se_bits_per_use;
        se2 += select_etype2_pmi(h, grid, cfg, 0.1).second.se_bits_per_use;
    }
    CHECK(se2 > se1);
}

TEST_CASE("MMSE-IRC achieves at least matched-filter spectral efficiency") {
    const CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    Rng rng(31);
    int mmse_wins = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const ChannelProfile prof =
            make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, static_cast<uint64_t>(trial));
        const ChannelRealization h =
            realize(prof, 2, 2, geom, 0.0, static_cast<uint64_t>(trial) + 900);
        TypeIPmi pmi;
        pmi.rank = 2;
        pmi.i11 = static_cast<int>(rng.below(4));
        pmi.i12 = 0;
        pmi.cophase = {0, 2};
        const PrecoderSet f = build_precoder_set(pmi, grid, 2);
        const double noise_var = 0.2;
        double se_mmse = 0.0, se_mf = 0.0;
        for (int rb = 0; rb < 2; ++rb) {
            const arma::cx_mat& hm = h.per_rb[static_cast<size_t>(rb)];
            const arma::cx_mat h_eff = hm * f.per_rb[static_cast<size_t>(rb)];
            const arma::cx_mat g_mmse = mmse_irc_equalizer(h_eff, noise_var);
            const arma::cx_mat g_mf = h_eff.t();  // matched filter
            for (int r = 0; r < 2; ++r) {
                se_mmse += std::log2(1.0 + sinr(g_mmse.row(static_cast<arma::uword>(r)), hm,
                                                f.per_rb[static_cast<size_t>(rb)], r, noise_var));
                se_mf += std::log2(1.0 + sinr(g_mf.row(static_cast<arma::uword>(r)), hm,
                                              f.per_rb[static_cast<size_t>(rb)], r, noise_var));
            }
        }
        if (se_mmse >= se_mf - 1e-12) ++mmse_wins;
    }
    CHECK(mmse_wins >= trials * 95 / 100);
}

TEST_CASE("mismatched_se: zero staleness and zero speed reproduce the ideal SE") {
    const CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    const ChannelProfile still = make_profile(ProfileKind::nlos_rich, 0.0, 363e-9, 5);
    const ChannelRealization h = realize(still, 4, 2, geom, 0.0, 44);
    const auto [pmi, metrics] = select_type1_pmi(h, grid, cfg, 0.1);

    const LinkMetrics now = mismatched_se(h, Pmi{pmi}, grid, cfg, 0.1);
    CHECK(now.se_bits_per_use == doctest::Approx(metrics.se_bits_per_use).epsilon(1e-12));

    const ChannelRealization later = evolve(h, still, geom, 0.5);
    const LinkMetrics still_later = mismatched_se(later, Pmi{pmi}, grid, cfg, 0.1);
    CHECK(still_later.se_bits_per_use == doctest::Approx(metrics.se_bits_per_use).epsilon(1e-12));
}

TEST_CASE("mismatched_se: mobility makes stale precoding lose SE on average") {
    const CodebookConfig cfg = tiny_cfg();
    const DftBeamGrid grid = build_beam_grid(cfg);
    const ArrayGeometry geom{cfg.n1, cfg.n2};
    double ideal = 0.0, realized = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const ChannelProfile prof = make_profile(ProfileKind::nlos_rich, 16.67, 363e-9, seed);
        const ChannelRealization h = realize(prof, 4, 2, geom, 0.0, seed + 333);
        const auto [pmi, metrics] = select_type1_pmi(h, grid, cfg, 0.1);
        const ChannelRealization h_now = evolve(h, prof, geom, 0.005);
        const auto [pmi_now, metrics_now] = select_type1_pmi(h_now, grid, cfg, 0.1);
        ideal += metrics_now.se_bits_per_use;
        realized += mismatched_se(h_now, Pmi{pmi}, grid, cfg, 0.1).se_bits_per_use;
    }
    CHECK(realized < ideal);
}
