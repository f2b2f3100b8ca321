// SPDX-License-Identifier: Apache-2.0

#include "nrcba/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace nrcba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int exact_log2(long long v, const char* what) {
    if (!is_power_of_two(v)) {
        std::ostringstream os;
        os << what << " = " << v << " is not a power of two";
        throw NonPowerOfTwoError(os.str());
    }
    int b = 0;
    while ((1LL << b) < v) ++b;
    return b;
}

// ceil() with snap-to-integer tolerance so that e.g. 0.75*56 cannot land
// on 43 through floating-point noise.
int ceil_snapped(double v) {
    double f = std::floor(v + 1e-9);
    return (v - f > 1e-9) ? static_cast<int>(f) + 1 : static_cast<int>(f);
}

}  // namespace

int CodebookConfig::k_nz_per_layer(int rank) const {
    return ceil_snapped(beta * 2.0 * l_beams * m_bases(rank));
}

void CodebookConfig::validate() const {
    if (n1 < 1 || n2 < 1 || o1 < 1 || o2 < 1) throw Error("antenna/oversampling counts must be >= 1");
    if (2 * l_beams >= n_ports()) throw Error("2*l_beams must be < n_ports");
    if (l_beams < 1 || l_beams > 16) throw Error("l_beams must be in [1, 16]");
    if (m_bases_low_rank < 1 || m_bases_low_rank > n_subbands ||
        m_bases_high_rank < 1 || m_bases_high_rank > n_subbands)
        throw Error("m_bases must be in [1, n_subbands]");
    if (n_subbands < 1) throw Error("n_subbands must be >= 1");
    if (max_rank < 1 || max_rank > 4) throw Error("max_rank must be in [1, 4]");
    if (!(beta > 0.0 && beta <= 1.0)) throw Error("beta must be in (0, 1]");
    if (amp_bits + phase_bits != 7) throw Error("amp_bits + phase_bits must equal 7");
}

int DftBeamGrid::col_index(int i1, int i2) const {
    const int e1 = extent1(), e2 = extent2();
    i1 = ((i1 % e1) + e1) % e1;
    i2 = ((i2 % e2) + e2) % e2;
    return i1 * e2 + i2;
}

DftBeamGrid build_beam_grid(const CodebookConfig& config) {
    config.validate();
    const int n1 = config.n1, n2 = config.n2;
    const int e1 = n1 * config.o1, e2 = n2 * config.o2;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n1 * n2));

    arma::cx_mat cols(n1 * n2, e1 * e2);
    for (int i1 = 0; i1 < e1; ++i1) {
        for (int i2 = 0; i2 < e2; ++i2) {
            const int c = i1 * e2 + i2;
            for (int m = 0; m < n1; ++m) {
                for (int n = 0; n < n2; ++n) {
                    const double ph = kTwoPi * (double(m) * i1 / e1 + double(n) * i2 / e2);
                    cols(m * n2 + n, c) = std::polar(scale, ph);
                }
            }
        }
    }
    return DftBeamGrid{config, std::move(cols)};
}

std::pair<int, int> type1_layer_offset(const CodebookConfig& config, int layer) {
    switch (layer & 3) {
        case 0: return {0, 0};
        case 1: return {config.o1, 0};
        case 2: return {0, config.o2};
        default: return {config.o1, config.o2};
    }
}

void TypeIPmi::validate(const CodebookConfig& config) const {
    if (rank < 1 || rank > config.max_rank) throw Error("TypeIPmi: rank out of range");
    if (i11 < 0 || i11 >= config.n1 * config.o1) throw Error("TypeIPmi: i11 out of range");
    if (i12 < 0 || i12 >= config.n2 * config.o2) throw Error("TypeIPmi: i12 out of range");
    if (static_cast<int>(cophase.size()) != config.n_subbands)
        throw Error("TypeIPmi: cophase length != n_subbands");
    for (uint8_t c : cophase) {
        if (c > 3) throw Error("TypeIPmi: cophase index out of range");
        if (rank >= 2 && c != 0 && c != 2) throw Error("TypeIPmi: rank >= 2 requires cophase in {0, 2}");
    }
}

void ETypeIIPmi::validate(const CodebookConfig& config, bool allow_empty_layers) const {
    if (rank < 1 || rank > config.max_rank) throw Error("ETypeIIPmi: rank out of range");
    if (static_cast<int>(layers.size()) != rank) throw Error("ETypeIIPmi: layers.size() != rank");
    if (static_cast<int>(beam_set.size()) != config.l_beams)
        throw Error("ETypeIIPmi: beam_set size != l_beams");
    if (q1 < 0 || q1 >= config.o1 || q2 < 0 || q2 >= config.o2)
        throw Error("ETypeIIPmi: rotation out of range");

    std::set<int> beams(beam_set.begin(), beam_set.end());
    if (static_cast<int>(beams.size()) != config.l_beams) throw Error("ETypeIIPmi: duplicate beams");
    if (*beams.begin() < 0 || *beams.rbegin() >= config.n1 * config.n2)
        throw Error("ETypeIIPmi: beam index out of range");

    const int m = config.m_bases(rank);
    const int k_nz = config.k_nz_per_layer(rank);
    for (const auto& layer : layers) {
        if (static_cast<int>(layer.basis_set.size()) != m)
            throw Error("ETypeIIPmi: basis_set size != m_bases(rank)");
        std::set<int> bases(layer.basis_set.begin(), layer.basis_set.end());
        if (static_cast<int>(bases.size()) != m) throw Error("ETypeIIPmi: duplicate bases");
        if (*bases.begin() < 0 || *bases.rbegin() >= config.n_subbands)
            throw Error("ETypeIIPmi: basis index out of range");

        if (layer.coeffs.empty() && allow_empty_layers) continue;
        if (static_cast<int>(layer.coeffs.size()) != k_nz)
            throw Error("ETypeIIPmi: coefficient count != K_nz");
        std::set<std::pair<int, int>> pos;
        for (const auto& c : layer.coeffs) {
            if (c.row < 0 || c.row >= 2 * config.l_beams || c.col < 0 || c.col >= m)
                throw InvalidCoefficientError("ETypeIIPmi: coefficient (row, col) outside grid");
            if (c.amp_index >= (1u << config.amp_bits) || c.phase_index >= (1u << config.phase_bits))
                throw InvalidCoefficientError("ETypeIIPmi: quantization index out of range");
            if (!pos.insert({c.row, c.col}).second)
                throw InvalidCoefficientError("ETypeIIPmi: duplicate coefficient position");
        }
        if (layer.strongest_row < 0 || layer.strongest_row >= 2 * config.l_beams)
            throw Error("ETypeIIPmi: strongest_row out of range");
    }
}

double etype2_amp_value(uint8_t amp_index) { return std::exp2(-0.5 * amp_index); }

arma::cx_double etype2_coeff_value(const ETypeIICoeff& c) {
    return std::polar(etype2_amp_value(c.amp_index), kTwoPi * c.phase_index / 16.0);
}

arma::cx_mat build_type1_precoder(const TypeIPmi& pmi, const DftBeamGrid& grid, int subband) {
    const CodebookConfig& cfg = grid.config;
    pmi.validate(cfg);
    if (subband < 0 || subband >= cfg.n_subbands) throw Error("subband out of range");

    const int np = cfg.n_ports();
    const int half = np / 2;
    const double scale = 1.0 / std::sqrt(2.0 * pmi.rank);  // grid beams are already unit norm
    const arma::cx_double cophase =
        std::polar(1.0, kTwoPi * pmi.cophase[static_cast<size_t>(subband)] / 4.0);

    arma::cx_mat w(np, pmi.rank);
    for (int r = 0; r < pmi.rank; ++r) {
        auto [k1, k2] = type1_layer_offset(cfg, r);
        arma::cx_vec b = grid.beam(pmi.i11 + k1, pmi.i12 + k2);
        w.col(r).head(half) = scale * b;
        w.col(r).tail(half) = scale * cophase * b;
    }
    return w;
}

ETypeIIPrecoder build_etype2_precoder(const ETypeIIPmi& pmi, const DftBeamGrid& grid,
                                      const CodebookConfig& config) {
    pmi.validate(config, /*allow_empty_layers=*/true);

    const int np = config.n_ports();
    const int half = np / 2;
    const int big_l = config.l_beams;
    const int n_sb = config.n_subbands;
    const int m = config.m_bases(pmi.rank);

    // Rotated beam matrix B: half x L, columns unit norm and orthogonal.
    arma::cx_mat b(half, big_l);
    for (int l = 0; l < big_l; ++l) {
        const int x1 = pmi.beam_set[static_cast<size_t>(l)] / config.n2;
        const int x2 = pmi.beam_set[static_cast<size_t>(l)] % config.n2;
        b.col(l) = grid.beam(pmi.q1 + config.o1 * x1, pmi.q2 + config.o2 * x2);
    }

    ETypeIIPrecoder out;
    out.per_subband.assign(static_cast<size_t>(n_sb), arma::cx_mat(np, pmi.rank, arma::fill::zeros));
    out.degenerate_layer.assign(static_cast<size_t>(pmi.rank), false);

    for (int layer = 0; layer < pmi.rank; ++layer) {
        const auto& lay = pmi.layers[static_cast<size_t>(layer)];
        if (lay.coeffs.empty()) {
            out.degenerate_layer[static_cast<size_t>(layer)] = true;
            continue;
        }
        arma::cx_mat coeff(2 * big_l, m, arma::fill::zeros);
        for (const auto& c : lay.coeffs) coeff(c.row, c.col) = etype2_coeff_value(c);

        // Per-subband combination vector c_sb = C * f_sb, where f_sb holds the
        // selected subband-DFT bases evaluated at subband sb.
        arma::cx_mat per_sb(2 * big_l, n_sb);
        for (int sb = 0; sb < n_sb; ++sb) {
            arma::cx_vec f(m);
            for (int i = 0; i < m; ++i)
                f(i) = std::polar(1.0, kTwoPi * lay.basis_set[static_cast<size_t>(i)] * sb / n_sb);
            per_sb.col(sb) = coeff * f;
        }

        // Map beam-space rows to ports through W1 = blkdiag(B, B).
        arma::cx_mat port(np, n_sb);
        port.rows(0, half - 1) = b * per_sb.rows(0, big_l - 1);
        port.rows(half, np - 1) = b * per_sb.rows(big_l, 2 * big_l - 1);

        const double mean_pow = arma::accu(arma::square(arma::abs(port))) / n_sb;
        if (mean_pow < 1e-300) {
            out.degenerate_layer[static_cast<size_t>(layer)] = true;
            continue;
        }
        port /= std::sqrt(mean_pow);
        for (int sb = 0; sb < n_sb; ++sb)
            out.per_subband[static_cast<size_t>(sb)].col(layer) = port.col(sb);
    }
    return out;
}

OverheadReport type1_overhead_bits(const CodebookConfig& config, int rank) {
    config.validate();
    if (rank < 1 || rank > config.max_rank) throw Error("rank out of range");
    OverheadReport r;
    r.wideband_bits = exact_log2(static_cast<long long>(config.n1) * config.o1, "n1*o1") +
                      exact_log2(static_cast<long long>(config.n2) * config.o2, "n2*o2") + 2;
    r.subband_bits = static_cast<long long>(config.n_subbands) * (rank == 1 ? 2 : 1);
    r.total_bits = r.wideband_bits + r.subband_bits;
    return r;
}

OverheadReport etype2_overhead_bits(const CodebookConfig& config, int rank) {
    config.validate();
    if (rank < 1 || rank > config.max_rank) throw Error("rank out of range");
    const int m = config.m_bases(rank);
    const int k_nz = config.k_nz_per_layer(rank);

    OverheadReport r;
    r.wideband_bits =
        detail::ceil_log2_u128(detail::binomial_u128(config.n1 * config.n2, config.l_beams)) +
        detail::ceil_log2_u128(static_cast<unsigned __int128>(config.o1) * config.o2);
    r.subband_bits = detail::ceil_log2_u128(detail::binomial_u128(config.n_subbands, m));
    const long long per_layer = 5 + 7LL * k_nz + 2LL * config.l_beams * m;
    r.per_layer_bits.assign(static_cast<size_t>(rank), per_layer);
    r.total_bits = r.wideband_bits + r.subband_bits + per_layer * rank;
    return r;
}

long long overhead_tax(const CodebookConfig& config, int rank_type1, int rank_type2) {
    const long long tax = etype2_overhead_bits(config, rank_type2).total_bits -
                          type1_overhead_bits(config, rank_type1).total_bits;
    if (tax < 0) {
        std::ostringstream os;
        os << "negative overhead tax (" << tax << " bits): EType II config cheaper than Type I";
        throw NegativeTaxError(os.str());
    }
    return tax;
}

BitString encode_type1(const TypeIPmi& pmi, const CodebookConfig& config) {
    pmi.validate(config);
    const int w1 = exact_log2(static_cast<long long>(config.n1) * config.o1, "n1*o1");
    const int w2 = exact_log2(static_cast<long long>(config.n2) * config.o2, "n2*o2");

    BitWriter w;
    w.put(static_cast<uint64_t>(pmi.i11), w1);
    w.put(static_cast<uint64_t>(pmi.i12), w2);
    w.put(static_cast<uint64_t>(pmi.rank - 1), 2);
    const int wc = pmi.rank == 1 ? 2 : 1;
    for (uint8_t c : pmi.cophase) w.put(pmi.rank == 1 ? c : c / 2, wc);
    return w.take();
}

TypeIPmi decode_type1(const BitString& bits, const CodebookConfig& config) {
    const int w1 = exact_log2(static_cast<long long>(config.n1) * config.o1, "n1*o1");
    const int w2 = exact_log2(static_cast<long long>(config.n2) * config.o2, "n2*o2");

    BitReader r(bits);
    TypeIPmi pmi;
    pmi.i11 = static_cast<int>(r.get(w1));
    pmi.i12 = static_cast<int>(r.get(w2));
    pmi.rank = static_cast<int>(r.get(2)) + 1;
    if (pmi.rank > config.max_rank) throw CodecError("decoded rank exceeds max_rank");
    const int wc = pmi.rank == 1 ? 2 : 1;
    pmi.cophase.resize(static_cast<size_t>(config.n_subbands));
    for (auto& c : pmi.cophase)
        c = static_cast<uint8_t>(pmi.rank == 1 ? r.get(wc) : 2 * r.get(wc));
    if (r.remaining() != 0) throw CodecError("trailing bits after Type I PMI");
    pmi.validate(config);
    return pmi;
}

BitString encode_etype2(const ETypeIIPmi& pmi, const CodebookConfig& config) {
    pmi.validate(config);
    for (const auto& lay : pmi.layers)
        if (lay.basis_set != pmi.layers.front().basis_set)
            throw CodecError("EType II layers must share one frequency basis set");

    const int n_beams = config.n1 * config.n2;
    const int m = config.m_bases(pmi.rank);
    const int wb_beam = detail::ceil_log2_u128(detail::binomial_u128(n_beams, config.l_beams));
    const int wb_rot = detail::ceil_log2_u128(static_cast<unsigned __int128>(config.o1) * config.o2);
    const int sb_basis = detail::ceil_log2_u128(detail::binomial_u128(config.n_subbands, m));

    BitWriter w;
    w.put(detail::subset_lex_rank(pmi.beam_set, n_beams), wb_beam);
    w.put(static_cast<uint64_t>(pmi.q1) * config.o2 + pmi.q2, wb_rot);
    w.put(detail::subset_lex_rank(pmi.layers.front().basis_set, config.n_subbands), sb_basis);

    for (const auto& lay : pmi.layers) {
        w.put(static_cast<uint64_t>(lay.strongest_row), 5);
        std::vector<ETypeIICoeff> ordered = lay.coeffs;
        std::sort(ordered.begin(), ordered.end(), [m](const auto& a, const auto& b) {
            return a.row * m + a.col < b.row * m + b.col;
        });
        size_t next = 0;
        for (int row = 0; row < 2 * config.l_beams; ++row)
            for (int col = 0; col < m; ++col) {
                const bool set = next < ordered.size() && ordered[next].row == row &&
                                 ordered[next].col == col;
                w.put(set ? 1 : 0, 1);
                if (set) ++next;
            }
        for (const auto& c : ordered) {
            w.put(c.amp_index, config.amp_bits);
            w.put(c.phase_index, config.phase_bits);
        }
    }
    return w.take();
}

ETypeIIPmi decode_etype2(const BitString& bits, const CodebookConfig& config, int rank) {
    if (rank < 1 || rank > config.max_rank) throw CodecError("rank out of range");
    const int n_beams = config.n1 * config.n2;
    const int m = config.m_bases(rank);
    const int k_nz = config.k_nz_per_layer(rank);
    const int wb_beam = detail::ceil_log2_u128(detail::binomial_u128(n_beams, config.l_beams));
    const int wb_rot = detail::ceil_log2_u128(static_cast<unsigned __int128>(config.o1) * config.o2);
    const int sb_basis = detail::ceil_log2_u128(detail::binomial_u128(config.n_subbands, m));

    BitReader r(bits);
    ETypeIIPmi pmi;
    pmi.rank = rank;
    pmi.beam_set = detail::subset_lex_unrank(r.get(wb_beam), n_beams, config.l_beams);
    const uint64_t rot = r.get(wb_rot);
    pmi.q1 = static_cast<int>(rot / config.o2);
    pmi.q2 = static_cast<int>(rot % config.o2);
    if (pmi.q1 >= config.o1) throw CodecError("decoded rotation out of range");
    std::vector<int> basis = detail::subset_lex_unrank(r.get(sb_basis), config.n_subbands, m);

    pmi.layers.resize(static_cast<size_t>(rank));
    for (auto& lay : pmi.layers) {
        lay.basis_set = basis;
        lay.strongest_row = static_cast<int>(r.get(5));
        for (int row = 0; row < 2 * config.l_beams; ++row)
            for (int col = 0; col < m; ++col)
                if (r.get(1)) lay.coeffs.push_back({row, col, 0, 0});
        if (static_cast<int>(lay.coeffs.size()) != k_nz)
            throw CodecError("decoded bitmap population != K_nz");
        for (auto& c : lay.coeffs) {
            c.amp_index = static_cast<uint8_t>(r.get(config.amp_bits));
            c.phase_index = static_cast<uint8_t>(r.get(config.phase_bits));
        }
    }
    if (r.remaining() != 0) throw CodecError("trailing bits after EType II PMI");
    pmi.validate(config);
    return pmi;
}

std::string BitString::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 15]);
    }
    return s;
}

namespace detail {

unsigned __int128 binomial_u128(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        const unsigned __int128 factor = static_cast<unsigned __int128>(n - k + i);
        if (r > kMax / factor) throw OverflowError("binomial exceeds 128-bit range");
        r = r * factor / i;  // division is exact after multiplying i consecutive terms
    }
    return r;
}

int ceil_log2_u128(unsigned __int128 v) {
    if (v == 0) throw Error("ceil_log2 of zero");
    int bits = 0;
    bool pow2 = true;
    unsigned __int128 x = v;
    while (x > 1) {
        if (x & 1) pow2 = false;
        x >>= 1;
        ++bits;
    }
    return pow2 ? bits : bits + 1;
}

uint64_t subset_lex_rank(const std::vector<int>& subset, int n) {
    const int k = static_cast<int>(subset.size());
    unsigned __int128 rank = 0;
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        for (int j = prev + 1; j < subset[static_cast<size_t>(i)]; ++j)
            rank += binomial_u128(n - 1 - j, k - 1 - i);
        prev = subset[static_cast<size_t>(i)];
    }
    if (rank > ~uint64_t{0}) throw OverflowError("subset rank exceeds 64 bits");
    return static_cast<uint64_t>(rank);
}

std::vector<int> subset_lex_unrank(uint64_t rank, int n, int k) {
    std::vector<int> subset;
    subset.reserve(static_cast<size_t>(k));
    unsigned __int128 remaining = rank;
    int next = 0;
    for (int i = 0; i < k; ++i) {
        for (int j = next; j <= n - (k - i); ++j) {
            const unsigned __int128 block = binomial_u128(n - 1 - j, k - 1 - i);
            if (remaining < block) {
                subset.push_back(j);
                next = j + 1;
                break;
            }
            remaining -= block;
            if (j == n - (k - i)) throw CodecError("subset rank out of range");
        }
    }
    return subset;
}

}  // namespace detail

}  // namespace nrcba
