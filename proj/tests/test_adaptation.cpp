// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "nrcba/adaptation.hpp"
#include "nrcba/rng.hpp"

using namespace nrcba;

TEST_CASE("se_gain: ratio arithmetic and zero-baseline guard") {
    CHECK(se_gain(10.0, 10.0) == 0.0);
    CHECK(se_gain(11.0, 10.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(se_gain(5.0, 10.0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK_THROWS_AS(se_gain(1.0, 0.0), BaselineZeroError);
    CHECK_THROWS_AS(se_gain(1.0, 1e-13), BaselineZeroError);
}

TEST_CASE("utility: baseline scores zero, EType II pays the tax") {
    UtilityConfig cfg;
    cfg.lambda = 1e-4;
    CHECK(utility(CodebookChoice::type1, 0.5, 0, cfg) == 0.0);
    CHECK(utility(CodebookChoice::etype2, 0.10, 713, cfg) ==
          doctest::Approx(0.0287).epsilon(1e-9));
    // a 5% gain does not cover 713 bits at lambda = 1e-4: Type I wins
    CHECK(utility(CodebookChoice::etype2, 0.05, 713, cfg) ==
          doctest::Approx(-0.0213).epsilon(1e-9));
    CHECK_THROWS_AS(utility(CodebookChoice::etype2, 0.1, -1, cfg), NegativeTaxError);
    UtilityConfig bad;
    bad.lambda = 2.0;
    CHECK_THROWS_AS(utility(CodebookChoice::etype2, 0.1, 1, bad), Error);
}

TEST_CASE("argmax is invariant to scaling both SE values") {
    UtilityConfig cfg;
    cfg.lambda = 1e-4;
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const double se1 = 0.5 + 20.0 * rng.uniform();
        const double se2 = 0.5 + 20.0 * rng.uniform();
        const long long tax = 100 + static_cast<long long>(rng.below(900));
        const auto choice = [&](double scale) {
            const double u1 =
                utility(CodebookChoice::etype2, se_gain(scale * se2, scale * se1), tax, cfg);
            return u1 > 0.0 ? CodebookChoice::etype2 : CodebookChoice::type1;
        };
        CHECK(choice(1.0) == choice(2.0));
        CHECK(choice(1.0) == choice(0.25));
        CHECK(choice(1.0) == choice(1024.0));
    }
}

TEST_CASE("the EType II region shrinks as lambda grows") {
    Rng rng(29);
    std::vector<std::pair<double, long long>> samples;  // (gain, tax)
    for (int i = 0; i < 300; ++i)
        samples.emplace_back(rng.uniform(-0.2, 0.4), 200 + static_cast<long long>(rng.below(800)));
    size_t prev_count = samples.size() + 1;
    for (double lambda : {0.0, 1e-5, 1e-4, 1e-3, 1e-2}) {
        UtilityConfig cfg;
        cfg.lambda = lambda;
        size_t count = 0;
        for (const auto& [gain, tax] : samples)
            if (utility(CodebookChoice::etype2, gain, tax, cfg) > 0.0) ++count;
        CHECK(count <= prev_count);
        prev_count = count;
    }
}

TEST_CASE("label_sample: LoS at high SNR keeps Type I, rich scattering at low SNR flips") {
    const CodebookConfig cb;
    const UtilityConfig util;  // lambda = 1e-4
    const DftBeamGrid grid = build_beam_grid(cb);
    const ArrayGeometry geom{cb.n1, cb.n2};

    int type1_los = 0, etype2_rich = 0;
    const int seeds = 5;
    for (uint64_t seed = 0; seed < seeds; ++seed) {
        const ChannelProfile los = make_profile(ProfileKind::los_high_corr, 0.833, 363e-9, seed);
        const ChannelRealization h_los = realize(los, 26, 4, geom, 0.0, seed + 1);
        const auto [rep_los, choice_los] = label_sample(h_los, grid, cb, util, 0.01);  // 20 dB
        CHECK(rep_los.u0 == 0.0);
        CHECK(rep_los.choice == choice_los);
        if (choice_los == CodebookChoice::type1) ++type1_los;

        const ChannelProfile rich = make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, seed);
        const ChannelRealization h_rich = realize(rich, 26, 4, geom, 0.0, seed + 1);
        const auto [rep_rich, choice_rich] = label_sample(h_rich, grid, cb, util, 1.0);  // 0 dB
        CHECK(rep_rich.u0 == 0.0);
        if (choice_rich == CodebookChoice::etype2) ++etype2_rich;
    }
    CHECK(type1_los == seeds);
    CHECK(etype2_rich == seeds);
}

TEST_CASE("label_sample: lambda = 0 always prefers a positive-gain EType II") {
    const CodebookConfig cb;
    UtilityConfig util;
    util.lambda = 0.0;
    const DftBeamGrid grid = build_beam_grid(cb);
    const ArrayGeometry geom{cb.n1, cb.n2};
    for (uint64_t seed = 0; seed < 5; ++seed) {
        const ChannelProfile rich = make_profile(ProfileKind::nlos_rich, 0.833, 363e-9, seed);
        const ChannelRealization h = realize(rich, 26, 4, geom, 0.0, seed + 7);
        const auto [report, choice] = label_sample(h, grid, cb, util, 0.1);
        if (report.gain_type2 > 0.0) {
            CHECK(choice == CodebookChoice::etype2);
            CHECK(report.u1 == doctest::Approx(report.gain_type2).epsilon(1e-12));
        }
    }
}
