#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace secbeam;
using testsupport::t1;
using testsupport::t1_beams;

TEST(BackscatterGain, ToyInstance)
{
    EXPECT_DOUBLE_EQ(backscatter_gain(t1(), t1_beams()), 4.0);
}

TEST(BackscatterGain, ZeroBeamsAndZeroChannel)
{
    BeamPair zero{CVec::Zero(2), CVec::Zero(2)};
    EXPECT_EQ(backscatter_gain(t1(), zero), 0.0);
    NetworkInstance inst = t1();
    inst.h_b.setZero();
    EXPECT_EQ(backscatter_gain(inst, t1_beams()), 0.0);
}

TEST(BackscatterGain, DimensionMismatchThrows)
{
    BeamPair b{CVec::Zero(3), CVec::Zero(3)};
    EXPECT_THROW(backscatter_gain(t1(), b), std::invalid_argument);
}

TEST(DirectSinrs, ToyInstance)
{
    const DirectSinrs s = direct_sinrs(t1(), t1_beams());
    EXPECT_NEAR(s.gamma_cc, 4.0 / 3.0, 1e-15);
    EXPECT_EQ(s.gamma_ce, 0.0);
    EXPECT_EQ(s.gamma_vc, 0.0);
    EXPECT_EQ(s.gamma_vb, 0.0);
    EXPECT_EQ(s.gamma_ve, 0.0);
}

TEST(DirectSinrs, MatchesLoopOracleOnRandomInstances)
{
    SplitMix64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const NetworkInstance inst = sample_instance(ChannelProfile{}, 1000 + k);
        const BeamPair b = testsupport::random_beams(rng, inst.antennas(), inst.P);
        const DirectSinrs s = direct_sinrs(inst, b);
        const auto o = testsupport::oracle(inst, b);
        EXPECT_NEAR(s.gamma_cc, o.gamma_cc, 1e-10 * (1 + o.gamma_cc));
        EXPECT_NEAR(s.gamma_ce, o.gamma_ce, 1e-10 * (1 + o.gamma_ce));
        EXPECT_NEAR(s.gamma_ee, o.gamma_ee, 1e-10 * (1 + o.gamma_ee));
        EXPECT_NEAR(s.gamma_vc, o.gamma_vc, 1e-10 * (1 + o.gamma_vc));
        EXPECT_NEAR(s.gamma_ve, o.gamma_ve, 1e-10 * (1 + o.gamma_ve));
        EXPECT_NEAR(s.gamma_vb, o.gamma_vb, 1e-10 * (1 + o.gamma_vb));
        for (double g : {s.gamma_cc, s.gamma_ce, s.gamma_ee, s.gamma_vc, s.gamma_ve, s.gamma_vb}) {
            EXPECT_GE(g, 0.0);
            EXPECT_TRUE(std::isfinite(g));
        }
    }
}

TEST(GammaCbRealized, ToyAndTrivialCases)
{
    EXPECT_DOUBLE_EQ(gamma_cb_realized(t1(), t1_beams(), 1.0, 1.0), 2.0);
    EXPECT_EQ(gamma_cb_realized(t1(), t1_beams(), 0.0, 0.0), 0.0);
    NetworkInstance inst = t1();
    inst.alpha = 0.0;
    EXPECT_EQ(gamma_cb_realized(inst, t1_beams(), cplx(0.3, -1.2), cplx(2.0, 0.5)), 0.0);
}

TEST(SecrecyRates, ToyInstance)
{
    const SecrecyRates r = secrecy_rates(t1(), t1_beams());
    EXPECT_NEAR(r.R_c, std::log2(7.0 / 3.0), 1e-14);
    EXPECT_NEAR(r.R_c, 1.22239, 1e-5);
}

TEST(SecrecyRates, ZeroCentralBeamGivesZeroRate)
{
    BeamPair b = t1_beams();
    b.w_c.setZero();
    EXPECT_EQ(secrecy_rates(t1(), b).R_c, 0.0);
}

TEST(SecrecyRates, StrongEavesdropperGivesNegativeRate)
{
    NetworkInstance inst = t1();
    inst.h_v = 10.0 * inst.h_c;
    inst.g_v = 0.0;
    EXPECT_LT(secrecy_rates(inst, t1_beams()).R_c, 0.0);
}

TEST(SecrecyRates, NoEavesdropperReducesToPlainRates)
{
    SplitMix64 rng(5);
    for (int k = 0; k < 50; ++k) {
        NetworkInstance inst = sample_instance(ChannelProfile{}, 77 + k);
        inst.h_v *= 0.0;
        inst.g_v *= 0.0;
        const BeamPair b = testsupport::random_beams(rng, inst.antennas(), inst.P);
        const DirectSinrs s = direct_sinrs(inst, b);
        const SecrecyRates r = secrecy_rates(inst, b);
        EXPECT_EQ(r.R_c, std::log2(1.0 + s.gamma_cc));
        EXPECT_EQ(r.R_e, std::log2(1.0 + s.gamma_ee));
    }
}

TEST(SecrecyRates, MatchesLoopOracle)
{
    SplitMix64 rng(12);
    for (int k = 0; k < 200; ++k) {
        const NetworkInstance inst = sample_instance(ChannelProfile{}, 3000 + k);
        const BeamPair b = testsupport::random_beams(rng, inst.antennas(), inst.P);
        const SecrecyRates r = secrecy_rates(inst, b);
        const auto o = testsupport::oracle(inst, b);
        EXPECT_NEAR(r.R_c, o.R_c, 1e-10);
        EXPECT_NEAR(r.R_e, o.R_e, 1e-10);
        EXPECT_NEAR(r.R_ce, o.R_ce, 1e-10);
    }
}

TEST(OutageSuccess, ToyInstance)
{
    // zeta = 0, omega = 2: xi = (2 - 1) / 0.5 = 2, lambda = 4.
    EXPECT_NEAR(rb_outage_success(t1(), t1_beams(), 1.0), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(rb_outage_success(t1(), t1_beams(), 1.0), 0.60653, 1e-5);
}

TEST(OutageSuccess, ZeroRateWithoutEavesdropperIsCertain)
{
    EXPECT_EQ(rb_outage_success(t1(), t1_beams(), 0.0), 1.0);
}

TEST(OutageSuccess, BoundaryLambdaEqualsXiOverRho)
{
    // lambda = 4 on T1; choose omega so that xi = rho * lambda.
    const double rho = -std::log(0.9);
    const double omega = 1.0 + 0.5 * rho * 4.0;
    EXPECT_NEAR(rb_outage_success(t1(), t1_beams(), std::log2(omega)), 0.9, 1e-14);
}

TEST(OutageSuccess, EdgeRules)
{
    const BeamPair b = t1_beams();
    NetworkInstance dead = t1();
    dead.alpha = 0.0;
    EXPECT_EQ(rb_outage_success(dead, b, 0.0), 1.0);
    EXPECT_EQ(rb_outage_success(dead, b, 0.5), 0.0);

    BeamPair off{CVec::Zero(2), CVec::Zero(2)};
    off.w_e(1) = 1.0; // orthogonal to h_b: lambda = 0
    EXPECT_EQ(rb_outage_success(t1(), off, 0.5), 0.0);
    EXPECT_EQ(rb_outage_success(t1(), off, 0.0), 1.0);
    EXPECT_THROW(rb_outage_success(t1(), b, -0.1), std::invalid_argument);
}

TEST(OutageSuccess, NonincreasingInRate)
{
    SplitMix64 rng(21);
    for (int k = 0; k < 50; ++k) {
        const NetworkInstance inst = sample_instance(ChannelProfile{}, 500 + k);
        const BeamPair b = testsupport::random_beams(rng, inst.antennas(), inst.P);
        double prev = 1.0;
        for (int i = 0; i <= 100; ++i) {
            const double p = rb_outage_success(inst, b, 0.1 * i);
            EXPECT_LE(p, prev + 1e-15);
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
            prev = p;
        }
    }
}

TEST(OutageSuccess, MaxOutageRateSitsOnTheBoundary)
{
    SplitMix64 rng(8);
    for (int k = 0; k < 50; ++k) {
        const NetworkInstance inst = sample_instance(ChannelProfile{}, 900 + k);
        const BeamPair b = testsupport::random_beams(rng, inst.antennas(), inst.P);
        const auto r = max_outage_rate(inst, b, 0.1);
        if (!r)
            continue;
        EXPECT_NEAR(rb_outage_success(inst, b, *r), 0.9, 1e-9);
    }
}

TEST(Rho, MatchesNegativeLog)
{
    EXPECT_NEAR(outage_rho(0.1), 0.1053605, 1e-7);
    EXPECT_NEAR(outage_rho(0.1), -std::log(0.9), 1e-15);
}

TEST(Validation, RejectsBadInstancesAndTargets)
{
    NetworkInstance inst = t1();
    inst.alpha = 1.5;
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst = t1();
    inst.sigma2 = 0.0;
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst = t1();
    inst.h_v = CVec::Zero(3);
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    EXPECT_THROW((SecrecyTargets{-1.0, 0.0, 0.1}.validate()), std::invalid_argument);
    EXPECT_THROW((SecrecyTargets{1.0, 0.0, 1.0}.validate()), std::invalid_argument);
}
