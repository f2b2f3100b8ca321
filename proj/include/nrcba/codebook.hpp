// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <cstdint>
#include <utility>
#include <vector>

#include "nrcba/bitio.hpp"
#include "nrcba/error.hpp"

namespace nrcba {

// Which of the two feedback codebooks is in use; doubles as the binary
// class label of the adaptation task.
enum class CodebookChoice : int { type1 = 0, etype2 = 1 };

// Antenna, beam and basis dimensioning shared by the Type I and EType II
// codebooks. All search and construction code takes its sizes from here.
struct CodebookConfig {
    int n1 = 2;  // ports per polarization, horizontal
    int n2 = 8;  // ports per polarization, vertical
    int o1 = 4;  // horizontal oversampling
    int o2 = 4;  // vertical oversampling
    int l_beams = 4;            // EType II beam count L
    int m_bases_low_rank = 7;   // frequency bases M for rank 1..2
    int m_bases_high_rank = 4;  // frequency bases M for rank 3..4
    int n_subbands = 14;
    int max_rank = 4;
    double beta = 0.75;  // nonzero-coefficient fraction, K_nz = ceil(beta*2*L*M)
    int amp_bits = 3;
    int phase_bits = 4;

    int n_ports() const { return 2 * n1 * n2; }
    int m_bases(int rank) const { return rank <= 2 ? m_bases_low_rank : m_bases_high_rank; }
    int k_nz_per_layer(int rank) const;

    // Throws Error when any structural invariant is violated.
    void validate() const;
};

// Oversampled 2-D DFT beam grid. Column (i1, i2) is the Kronecker product
// of the 1-D horizontal and vertical oversampled DFT vectors; every column
// has unit norm, and the non-oversampled subset (i1 = o1*x1, i2 = o2*x2)
// is an orthonormal basis of the per-polarization port space.
struct DftBeamGrid {
    CodebookConfig config;
    arma::cx_mat columns;  // (n1*n2) x (n1*o1 * n2*o2)

    int extent1() const { return config.n1 * config.o1; }
    int extent2() const { return config.n2 * config.o2; }

    // Beam indices wrap modulo the grid extents.
    int col_index(int i1, int i2) const;
    arma::cx_vec beam(int i1, int i2) const { return columns.col(col_index(i1, i2)); }
};

DftBeamGrid build_beam_grid(const CodebookConfig& config);

// Type I PMI: one wideband beam, per-subband QPSK co-phase, transmission
// rank. Layer beam offsets (k1, k2) come from a fixed rank-keyed table
// (see type1_layer_offset); the 2-bit offset field of the bit string
// carries rank-1, which keys that table.
struct TypeIPmi {
    int i11 = 0;  // horizontal beam index in [0, n1*o1)
    int i12 = 0;  // vertical beam index in [0, n2*o2)
    int rank = 1;
    std::vector<uint8_t> cophase;  // per subband; c in {0..3} rank 1, c in {0,2} rank >= 2

    void validate(const CodebookConfig& config) const;

    bool operator==(const TypeIPmi&) const = default;
};

// Offset (k1, k2) of layer `layer` (0-based) relative to (i11, i12):
// {(0,0), (o1,0), (0,o2), (o1,o2)}. Offsets land on mutually orthogonal
// beams for any base index, which keeps layers orthogonal.
std::pair<int, int> type1_layer_offset(const CodebookConfig& config, int layer);

// One quantized linear-combination coefficient of the EType II codebook.
// Row indexes the 2L beam/polarization space, col the M frequency bases.
struct ETypeIICoeff {
    int row = 0;
    int col = 0;
    uint8_t amp_index = 0;    // 3 bits; amplitude 2^(-amp_index/2)
    uint8_t phase_index = 0;  // 4 bits; phase exp(j*2*pi*phase_index/16)

    bool operator==(const ETypeIICoeff&) const = default;
};

struct ETypeIILayer {
    std::vector<int> basis_set;         // M distinct subband-DFT basis indices, ascending
    std::vector<ETypeIICoeff> coeffs;   // K_nz entries, (row, col) unique, row-major order
    int strongest_row = 0;              // beam row of the strongest coefficient (5-bit field)

    bool operator==(const ETypeIILayer&) const = default;
};

struct ETypeIIPmi {
    std::vector<int> beam_set;  // L distinct indices into the n1*n2 orthogonal grid, ascending
    int q1 = 0;                 // rotation in [0, o1)
    int q2 = 0;                 // rotation in [0, o2)
    int rank = 1;
    std::vector<ETypeIILayer> layers;  // rank entries

    // `allow_empty_layers` admits the degenerate zero-coefficient case that
    // the precoder builder flags; the codec always requires exactly K_nz.
    void validate(const CodebookConfig& config, bool allow_empty_layers = false) const;

    bool operator==(const ETypeIIPmi&) const = default;
};

// Feedback bit accounting. total_bits is always the exact length of the
// corresponding encoded PMI bit string.
struct OverheadReport {
    long long wideband_bits = 0;
    long long subband_bits = 0;
    std::vector<long long> per_layer_bits;
    long long total_bits = 0;
};

// Dequantized amplitude/phase for a coefficient.
double etype2_amp_value(uint8_t amp_index);
arma::cx_double etype2_coeff_value(const ETypeIICoeff& c);

// W = W1*W2 for one subband: n_ports x rank, column r built from beam
// (i11+k1(r), i12+k2(r)) co-phased per polarization, total power 1.
arma::cx_mat build_type1_precoder(const TypeIPmi& pmi, const DftBeamGrid& grid, int subband);

struct ETypeIIPrecoder {
    std::vector<arma::cx_mat> per_subband;  // n_subbands entries, n_ports x rank
    std::vector<bool> degenerate_layer;     // true where a layer had no coefficients
};

// W^e = W1 * W2~ * Wf expanded per subband. Each non-degenerate layer is
// normalized to unit power averaged over subbands.
ETypeIIPrecoder build_etype2_precoder(const ETypeIIPmi& pmi, const DftBeamGrid& grid,
                                      const CodebookConfig& config);

OverheadReport type1_overhead_bits(const CodebookConfig& config, int rank);
OverheadReport etype2_overhead_bits(const CodebookConfig& config, int rank);

// EType II total minus Type I total at the given ranks; throws
// NegativeTaxError when the difference would be negative.
long long overhead_tax(const CodebookConfig& config, int rank_type1, int rank_type2);

// PMI bit-string codec, big-endian field order wideband -> subband ->
// per-layer, field widths exactly as in the overhead reports.
//
// Type I:    [i11][i12][offset=rank-1 : 2][cophase per subband]
// EType II:  [beam-set lex rank][rotation q1*o2+q2][basis-set lex rank]
//            then per layer [strongest_row : 5][bitmap : 2LM][amp:3 phase:4 x K_nz]
// The EType II rank is conveyed out of band (RI), so decode takes it.
BitString encode_type1(const TypeIPmi& pmi, const CodebookConfig& config);
TypeIPmi decode_type1(const BitString& bits, const CodebookConfig& config);
BitString encode_etype2(const ETypeIIPmi& pmi, const CodebookConfig& config);
ETypeIIPmi decode_etype2(const BitString& bits, const CodebookConfig& config, int rank);

namespace detail {

// Exact binomial coefficient with 128-bit accumulation; throws
// OverflowError beyond the representable range.
unsigned __int128 binomial_u128(int n, int k);

// ceil(log2(v)) for v >= 1.
int ceil_log2_u128(unsigned __int128 v);

// Lexicographic rank of a sorted k-subset of [0, n), and its inverse.
uint64_t subset_lex_rank(const std::vector<int>& subset, int n);
std::vector<int> subset_lex_unrank(uint64_t rank, int n, int k);

}  // namespace detail

}  // namespace nrcba
