// SPDX-License-Identifier: Apache-2.0
//
// Independent oracles for the test suites. Everything here recomputes
// expected values through a different route than the library: Pascal's
// triangle instead of the multiplicative binomial, loop-counted bit
// widths, direct formula evaluation on arma matrices, power iteration.

#pragma once

#include <armadillo>
#include <cmath>
#include <vector>

#include "nrcba/codebook.hpp"
#include "nrcba/rng.hpp"

namespace oracles {

using u128 = unsigned __int128;

// Binomial via Pascal's triangle (addition only).
inline u128 pascal_binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::vector<u128> row(static_cast<size_t>(n) + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = i; j >= 1; --j) row[static_cast<size_t>(j)] += row[static_cast<size_t>(j - 1)];
    return row[static_cast<size_t>(k)];
}

// Smallest b with 2^b >= x, counted by doubling.
inline int bits_needed(u128 x) {
    int b = 0;
    u128 v = 1;
    while (v < x) {
        v <<= 1;
        ++b;
    }
    return b;
}

// Exact integer log2 by doubling; -1 when not a power of two.
inline int exact_log2_or_minus1(long long x) {
    long long v = 1;
    int b = 0;
    while (v < x) {
        v <<= 1;
        ++b;
    }
    return v == x ? b : -1;
}

inline long long oracle_type1_total(const nrcba::CodebookConfig& cfg, int rank) {
    const int w1 = exact_log2_or_minus1(static_cast<long long>(cfg.n1) * cfg.o1);
    const int w2 = exact_log2_or_minus1(static_cast<long long>(cfg.n2) * cfg.o2);
    if (w1 < 0 || w2 < 0) return -1;
    return w1 + w2 + 2 + static_cast<long long>(cfg.n_subbands) * (rank == 1 ? 2 : 1);
}

inline long long oracle_etype2_total(const nrcba::CodebookConfig& cfg, int rank) {
    const int m = rank <= 2 ? cfg.m_bases_low_rank : cfg.m_bases_high_rank;
    // smallest integer >= beta * 2 L m, counted upward
    const double target = cfg.beta * 2.0 * cfg.l_beams * m;
    long long k_nz = 0;
    while (static_cast<double>(k_nz) < target - 1e-9) ++k_nz;
    const long long wb = bits_needed(pascal_binomial(cfg.n1 * cfg.n2, cfg.l_beams)) +
                         bits_needed(static_cast<u128>(cfg.o1) * static_cast<u128>(cfg.o2));
    const long long sb = bits_needed(pascal_binomial(cfg.n_subbands, m));
    return wb + sb + static_cast<long long>(rank) * (5 + 7 * k_nz + 2LL * cfg.l_beams * m);
}

// Random valid codebook config; n1*o1 and n2*o2 are kept powers of two so
// both overhead models apply.
inline nrcba::CodebookConfig random_codebook_config(nrcba::Rng& rng) {
    static const int pow2[] = {1, 2, 4, 8};
    nrcba::CodebookConfig cfg;
    for (;;) {
        cfg.n1 = pow2[rng.below(3)];
        cfg.n2 = pow2[rng.below(4)];
        if (cfg.n1 * cfg.n2 >= 2) break;
    }
    cfg.o1 = pow2[rng.below(3)];
    cfg.o2 = pow2[rng.below(3)];
    cfg.l_beams = 1 + static_cast<int>(rng.below(
        static_cast<uint64_t>(std::min(16, cfg.n1 * cfg.n2 - 1))));
    cfg.n_subbands = 1 + static_cast<int>(rng.below(20));
    cfg.m_bases_low_rank = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(cfg.n_subbands)));
    cfg.m_bases_high_rank = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(cfg.n_subbands)));
    cfg.max_rank = 1 + static_cast<int>(rng.below(4));
    cfg.beta = 0.05 + 0.95 * rng.uniform();
    cfg.validate();
    return cfg;
}

// Spectral-radius estimate from the geometric mean of power-iteration
// growth over a long window (robust to complex leading eigenpairs).
inline double power_iteration_radius(const arma::mat& a, int warmup = 2000, int window = 2000) {
    arma::vec v(a.n_rows, arma::fill::ones);
    v /= arma::norm(v);
    for (int i = 0; i < warmup; ++i) {
        v = a * v;
        const double n = arma::norm(v);
        if (n == 0.0) return 0.0;
        v /= n;
    }
    double log_sum = 0.0;
    for (int i = 0; i < window; ++i) {
        v = a * v;
        const double n = arma::norm(v);
        if (n == 0.0) return 0.0;
        log_sum += std::log(n);
        v /= n;
    }
    return std::exp(log_sum / window);
}

}  // namespace oracles
