// SPDX-License-Identifier: Apache-2.0

#include "nrcba/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nrcba/rng.hpp"

namespace nrcba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kDeg = std::numbers::pi / 180.0;

struct KindPreset {
    int n_clusters;
    double k_factor;
    double angle_spread_rad;
};

KindPreset preset_for(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::los_high_corr: return {4, 10.0, 5.0 * kDeg};
        case ProfileKind::nlos_rich: return {12, 0.0, 60.0 * kDeg};
        case ProfileKind::nlos_long_delay: return {12, 0.0, 60.0 * kDeg};
    }
    throw UnknownKindError("unknown profile kind");
}

double rms_delay_spread(const std::vector<ClusterGeometry>& clusters) {
    double mean = 0.0, second = 0.0;
    for (const auto& c : clusters) {
        mean += c.power * c.delay_s;
        second += c.power * c.delay_s * c.delay_s;
    }
    return std::sqrt(std::max(0.0, second - mean * mean));
}

// Planar-array steering vector over both polarizations; the second
// polarization block is offset by pol_phase.
arma::cx_vec tx_response(const ArrayGeometry& tx, double aod_az, double aod_zen,
                         double pol_phase) {
    const double u = 0.5 * std::sin(aod_az) * std::cos(aod_zen);
    const double v = 0.5 * std::sin(aod_zen);
    const int half = tx.n1 * tx.n2;
    arma::cx_vec a(2 * half);
    const arma::cx_double pol = std::polar(1.0, pol_phase);
    for (int m = 0; m < tx.n1; ++m)
        for (int n = 0; n < tx.n2; ++n) {
            const arma::cx_double e = std::polar(1.0, kTwoPi * (m * u + n * v));
            a(m * tx.n2 + n) = e;
            a(half + m * tx.n2 + n) = pol * e;
        }
    return a;
}

arma::cx_vec rx_response(int n_ue, double aoa) {
    arma::cx_vec a(n_ue);
    for (int k = 0; k < n_ue; ++k) a(k) = std::polar(1.0, kTwoPi * 0.5 * k * std::sin(aoa));
    return a;
}

ChannelRealization compute(const ChannelProfile& profile, const std::vector<ClusterState>& state,
                           int n_rb, int n_ue, const ArrayGeometry& tx, double time_s) {
    ChannelRealization out;
    out.time_s = time_s;
    out.profile_label = profile.label;
    out.cluster_state = state;
    out.per_rb.assign(static_cast<size_t>(n_rb),
                      arma::cx_mat(n_ue, tx.n_ports(), arma::fill::zeros));

    for (size_t c = 0; c < profile.clusters.size(); ++c) {
        const auto& geo = profile.clusters[c];
        const auto& st = state[c];
        if (geo.power <= 0.0) continue;
        const arma::cx_double gain =
            std::sqrt(geo.power) *
            std::polar(1.0, st.phase0 + kTwoPi * st.doppler_hz * time_s);
        const arma::cx_mat outer =
            gain * (rx_response(n_ue, geo.aoa) * tx_response(tx, geo.aod_az, geo.aod_zen, st.pol_phase).t());
        for (int rb = 0; rb < n_rb; ++rb) {
            const double f = (rb - 0.5 * (n_rb - 1)) * kRbWidthHz;
            out.per_rb[static_cast<size_t>(rb)] += std::polar(1.0, -kTwoPi * f * geo.delay_s) * outer;
        }
    }
    return out;
}

std::vector<ClusterState> draw_state(const ChannelProfile& profile, uint64_t seed) {
    Rng rng(seed_mix(seed, {0x57A7Eu}));
    const double lambda = kSpeedOfLight / profile.carrier_hz;
    std::vector<ClusterState> state(profile.clusters.size());
    for (auto& st : state) {
        st.phase0 = rng.uniform(0.0, kTwoPi);
        st.doppler_hz = (profile.speed_mps / lambda) * std::cos(rng.uniform(0.0, kTwoPi));
        st.pol_phase = rng.uniform(0.0, kTwoPi);
    }
    return state;
}

}  // namespace

ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "los_high_corr") return ProfileKind::los_high_corr;
    if (s == "nlos_rich") return ProfileKind::nlos_rich;
    if (s == "nlos_long_delay") return ProfileKind::nlos_long_delay;
    throw UnknownKindError("unknown profile kind: " + s);
}

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::los_high_corr: return "los_high_corr";
        case ProfileKind::nlos_rich: return "nlos_rich";
        case ProfileKind::nlos_long_delay: return "nlos_long_delay";
    }
    return "?";
}

ChannelProfile make_profile(ProfileKind kind, double speed_mps, double delay_spread_s,
                            uint64_t seed) {
    if (speed_mps < 0.0) throw Error("speed must be >= 0");
    if (delay_spread_s <= 0.0) throw Error("delay spread must be > 0");
    const KindPreset preset = preset_for(kind);

    Rng rng(seed_mix(seed, {0xC1u, static_cast<uint64_t>(kind)}));
    ChannelProfile p;
    p.kind = kind;
    p.k_factor = preset.k_factor;
    p.delay_spread_s = delay_spread_s;
    p.speed_mps = speed_mps;
    p.label = to_string(kind);

    const double mean_az = rng.uniform(-60.0 * kDeg, 60.0 * kDeg);
    const double mean_zen = rng.uniform(-30.0 * kDeg, 30.0 * kDeg);
    const double mean_aoa = rng.uniform(-60.0 * kDeg, 60.0 * kDeg);
    const double s = preset.angle_spread_rad;

    p.clusters.resize(static_cast<size_t>(preset.n_clusters));
    for (int c = 0; c < preset.n_clusters; ++c) {
        auto& cl = p.clusters[static_cast<size_t>(c)];
        if (c == 0) {
            cl.delay_s = 0.0;
            cl.aod_az = mean_az;
            cl.aod_zen = mean_zen;
            cl.aoa = mean_aoa;
        } else {
            cl.delay_s = rng.uniform(0.05, 1.0);  // raw; rescaled to the rms target below
            cl.aod_az = mean_az + rng.uniform(-s, s);
            cl.aod_zen = mean_zen + rng.uniform(-s, s) * 0.5;
            cl.aoa = mean_aoa + rng.uniform(-s, s);
        }
    }
    std::sort(p.clusters.begin(), p.clusters.end(),
              [](const auto& a, const auto& b) { return a.delay_s < b.delay_s; });

    // Exponentially decaying NLoS powers; an LoS ray takes K/(K+1) of the total.
    double nlos_total = 0.0;
    for (size_t c = 0; c < p.clusters.size(); ++c) {
        const bool los_ray = preset.k_factor > 0.0 && c == 0;
        p.clusters[c].power = los_ray ? 0.0 : std::exp(-3.0 * p.clusters[c].delay_s);
        nlos_total += p.clusters[c].power;
    }
    const double nlos_share = preset.k_factor > 0.0 ? 1.0 / (preset.k_factor + 1.0) : 1.0;
    for (auto& cl : p.clusters) cl.power *= nlos_share / nlos_total;
    if (preset.k_factor > 0.0)
        p.clusters.front().power = preset.k_factor / (preset.k_factor + 1.0);

    const double raw_rms = rms_delay_spread(p.clusters);
    if (raw_rms > 0.0) {
        const double scale = delay_spread_s / raw_rms;
        for (auto& cl : p.clusters) cl.delay_s *= scale;
    }
    return p;
}

ChannelRealization realize(const ChannelProfile& profile, int n_rb, int n_ue_antennas,
                           const ArrayGeometry& tx, double time_s, uint64_t seed) {
    if (n_rb < 1 || n_ue_antennas < 1 || tx.n1 < 1 || tx.n2 < 1)
        throw Error("realize: dimensions must be positive");
    return compute(profile, draw_state(profile, seed), n_rb, n_ue_antennas, tx, time_s);
}

ChannelRealization evolve(const ChannelRealization& realization, const ChannelProfile& profile,
                          const ArrayGeometry& tx, double dt_s) {
    if (dt_s < 0.0) throw Error("evolve: dt must be >= 0");
    if (realization.cluster_state.size() != profile.clusters.size())
        throw MissingStateError("realization carries no state for this profile");
    return compute(profile, realization.cluster_state, realization.n_rb(), realization.n_ue(), tx,
                   realization.time_s + dt_s);
}

}  // namespace nrcba
