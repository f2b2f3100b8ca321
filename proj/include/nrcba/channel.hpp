// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "nrcba/error.hpp"

namespace nrcba {

// RB width at 15 kHz subcarrier spacing (12 subcarriers).
inline constexpr double kRbWidthHz = 180e3;

enum class ProfileKind { los_high_corr, nlos_rich, nlos_long_delay };

ProfileKind profile_kind_from_string(const std::string& s);
std::string to_string(ProfileKind kind);

// Static geometry of one cluster. The single departure azimuth/zenith pair
// parameterizes the planar-array response; arrival is a ULA azimuth.
struct ClusterGeometry {
    double delay_s = 0.0;
    double power = 0.0;  // linear, all clusters sum to 1
    double aod_az = 0.0;
    double aod_zen = 0.0;
    double aoa = 0.0;
};

// Simplified clustered fading profile standing in for the CDL tables:
// LoS/NLoS split, rms delay spread and speed are the controllable knobs.
struct ChannelProfile {
    std::vector<ClusterGeometry> clusters;
    double k_factor = 0.0;  // linear Rician factor applied to cluster 0
    double delay_spread_s = 363e-9;
    double speed_mps = 0.0;
    double carrier_hz = 2.12e9;
    std::string label;
    ProfileKind kind = ProfileKind::nlos_rich;
};

// Per-cluster random draws kept so a realization can be evolved in time
// without re-randomizing.
struct ClusterState {
    double phase0 = 0.0;      // initial phase phi_c
    double doppler_hz = 0.0;  // nu_c = speed/lambda * cos(psi_c)
    double pol_phase = 0.0;   // phase offset between the two tx polarizations
};

// Transmit planar-array shape; n_ports = 2 * n1 * n2 (dual polarization),
// matching the DftBeamGrid port ordering.
struct ArrayGeometry {
    int n1 = 2;
    int n2 = 8;
    int n_ports() const { return 2 * n1 * n2; }
};

struct ChannelRealization {
    std::vector<arma::cx_mat> per_rb;  // n_rb entries, n_ue x n_ports
    double time_s = 0.0;
    std::string profile_label;
    std::vector<ClusterState> cluster_state;

    int n_rb() const { return static_cast<int>(per_rb.size()); }
    int n_ue() const { return per_rb.empty() ? 0 : static_cast<int>(per_rb.front().n_rows); }
    int n_ports() const { return per_rb.empty() ? 0 : static_cast<int>(per_rb.front().n_cols); }
};

// Builds a preset profile: los_high_corr (K=10, 4 clusters, +/-5 deg),
// nlos_rich (K=0, 12 clusters, +/-60 deg), nlos_long_delay (as nlos_rich).
// Cluster delays are scaled so the rms delay spread hits delay_spread_s.
ChannelProfile make_profile(ProfileKind kind, double speed_mps, double delay_spread_s,
                            uint64_t seed);

// Sum-of-clusters narrowband response at each RB-center frequency.
// Deterministic in (profile, seed, time).
ChannelRealization realize(const ChannelProfile& profile, int n_rb, int n_ue_antennas,
                           const ArrayGeometry& tx, double time_s, uint64_t seed);

// Same realization advanced by dt, reusing the stored cluster state.
ChannelRealization evolve(const ChannelRealization& realization, const ChannelProfile& profile,
                          const ArrayGeometry& tx, double dt_s);

// Subband covering a given RB when n_rb RBs are split evenly into n_sb
// reporting subbands.
inline int subband_of_rb(int rb, int n_rb, int n_sb) {
    return static_cast<int>(static_cast<long long>(rb) * n_sb / n_rb);
}

}  // namespace nrcba
