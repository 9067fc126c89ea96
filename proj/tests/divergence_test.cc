// Copyright 2026 The AFA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "afa/divergence.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "afa/errors.h"

namespace afa {
namespace {

const double kE = std::exp(1.0);

TEST(DiscretePair, FoldsOneSidedMassIntoInf) {
  const DiscretePair pair = DiscretePair::FromMasses(
      {"a", "b", "c", "d"}, {0.5, 0.4, 0.1, 0.0}, {0.3, 0.5, 0.0, 0.2});
  EXPECT_EQ(pair.size(), 2u);
  EXPECT_NEAR(pair.PInfMass(), 0.1, 1e-15);
  EXPECT_NEAR(pair.QInfMass(), 0.2, 1e-15);
}

TEST(DiscretePair, RejectsBadTotals) {
  EXPECT_THROW(DiscretePair::FromMasses({"a"}, {0.9}, {1.0}),
               std::invalid_argument);
  EXPECT_THROW(DiscretePair::FromMasses({"a", "b"}, {0.5}, {1.0}),
               std::invalid_argument);
  EXPECT_THROW(DiscretePair::FromMasses({"a", "b"}, {1.5, -0.5}, {0.5, 0.5}),
               std::invalid_argument);
}

TEST(HockeyStick, RandomizedResponseTotalVariation) {
  EXPECT_NEAR(HockeyStick(RrPair(0.75), 1.0), 0.5, 1e-15);
}

TEST(HockeyStick, AlphaZeroIsTotalMass) {
  EXPECT_DOUBLE_EQ(HockeyStick(RrPair(0.75), 0.0), 1.0);
  const DiscretePair with_inf =
      DiscretePair::FromMasses({"a", "b"}, {0.7, 0.3}, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(HockeyStick(with_inf, 0.0), 1.0);
}

TEST(HockeyStick, PaperGoldenRrValue) {
  // RR with p = e/(1+e) sits at delta = 0.3 when eps ~ 0.4719.
  const double p = kE / (1.0 + kE);
  EXPECT_NEAR(HockeyStick(RrPair(p), std::exp(0.4719)), 0.300, 1e-3);
}

TEST(HockeyStick, NegativeAlphaIsDomainError) {
  EXPECT_THROW(HockeyStick(RrPair(0.75), -0.1), std::domain_error);
}

TEST(HsSwap, IdenticalPairHasZeroTv) {
  const DiscretePair same =
      DiscretePair::FromMasses({"a", "b"}, {0.5, 0.5}, {0.5, 0.5});
  EXPECT_NEAR(HsSwap(same, 1.0), 0.0, 1e-15);
}

TEST(HsSwap, MatchesDirectEvaluationOnSwappedPair) {
  const DiscretePair pair = RrPair(0.75);
  EXPECT_NEAR(HsSwap(pair, 2.0), HockeyStick(pair.Swapped(), 2.0), 1e-12);
  EXPECT_NEAR(HsSwap(pair, 1.0), 0.5, 1e-12);
  EXPECT_THROW(HsSwap(pair, 0.0), std::domain_error);
}

TEST(HsSwap, IdentityHoldsForRandomPairs) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(4), q(4);
    double ps = 0, qs = 0;
    for (int i = 0; i < 4; ++i) {
      p[i] = unif(rng);
      q[i] = unif(rng);
      ps += p[i];
      qs += q[i];
    }
    for (int i = 0; i < 4; ++i) {
      p[i] /= ps;
      q[i] /= qs;
    }
    const DiscretePair pair =
        DiscretePair::FromMasses({"0", "1", "2", "3"}, p, q);
    for (double alpha : {0.25, 0.5, 1.0, 2.0, 5.0}) {
      EXPECT_NEAR(HsSwap(pair, alpha), HockeyStick(pair.Swapped(), alpha),
                  1e-12);
    }
  }
}

// Advanced joint convexity: H_{a'}((1-g)mu + g nu || (1-g)mu + g nu') =
// g H_a(nu || (1-b)mu + b nu') with a' = 1 + g(a-1) and b = a'/a, evaluated
// by brute force over atoms (the second argument may be a signed measure).
TEST(HockeyStick, AdvancedJointConvexityOnRandomTriples) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  const auto random_dist = [&](int n) {
    std::vector<double> v(n);
    double s = 0;
    for (double& x : v) {
      x = unif(rng);
      s += x;
    }
    for (double& x : v) x /= s;
    return v;
  };
  for (int trial = 0; trial < 40; ++trial) {
    const std::vector<double> mu = random_dist(3);
    const std::vector<double> nu = random_dist(3);
    const std::vector<double> nup = random_dist(3);
    for (double gamma : {0.2, 0.5, 0.8}) {
      for (double alpha : {0.3, 0.8, 1.0, 1.7, 4.0}) {
        const double alpha_prime = 1.0 + gamma * (alpha - 1.0);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < 3; ++i) {
          const double a = (1.0 - gamma) * mu[i] + gamma * nu[i];
          const double b = (1.0 - gamma) * mu[i] + gamma * nup[i];
          lhs += std::max(0.0, a - alpha_prime * b);
          rhs += std::max(0.0, nu[i] - ((alpha - alpha_prime) * mu[i] +
                                        alpha_prime * nup[i]));
        }
        EXPECT_NEAR(lhs, gamma * rhs, 1e-12);
      }
    }
  }
}

TEST(RenyiFromProfile, GaussianClosedForm) {
  // D_alpha(N(1,s^2) || N(0,s^2)) = alpha / (2 s^2).
  const RenyiResult r1 =
      RenyiFromProfile(GaussianProfile(1.0), GaussianProfile(1.0), 2.0);
  EXPECT_FALSE(r1.diverged);
  EXPECT_NEAR(r1.value, 1.0, 1e-4);
  const RenyiResult r2 =
      RenyiFromProfile(GaussianProfile(2.0), GaussianProfile(2.0), 3.0);
  EXPECT_NEAR(r2.value, 0.375, 1e-4);
}

TEST(RenyiFromProfile, IdenticalPairIsZero) {
  const PrivacyProfile floor{
      [](double a) { return std::max(0.0, 1.0 - a); }, Provenance::kExact};
  EXPECT_NEAR(RenyiFromProfile(floor, floor, 2.0).value, 0.0, 1e-12);
}

TEST(RenyiFromProfile, HeavyTailIsFlaggedInfinite) {
  // A profile decaying polynomially keeps e^{alpha eps} H unintegrable.
  const PrivacyProfile heavy{
      [](double a) { return std::min(1.0, 1.0 / (1.0 + 1e-3 * a)); },
      Provenance::kExact};
  const RenyiResult r = RenyiFromProfile(heavy, heavy, 2.0);
  EXPECT_TRUE(r.diverged);
  EXPECT_TRUE(std::isinf(r.value));
}

TEST(CdfsFromProfile, GaussianLossIsNormal) {
  // The sigma=1 Gaussian PLD is N(1/2, 1).
  const LossCdfPair cdfs = CdfsFromProfile(GaussianProfile(1.0));
  EXPECT_NEAR(cdfs.F(0.5), 0.5, 1e-3);
  EXPECT_NEAR(cdfs.F(1.5), NormalCdf(1.0), 1e-3);
  EXPECT_NEAR(cdfs.p_inf, 0.0, 1e-6);
  EXPECT_NEAR(cdfs.q_inf, 0.0, 1e-6);
}

TEST(CdfsFromProfile, DegeneratePairIsStepAtZero) {
  const PrivacyProfile floor{
      [](double a) { return std::max(0.0, 1.0 - a); }, Provenance::kExact};
  const LossCdfPair cdfs = CdfsFromProfile(floor);
  EXPECT_NEAR(cdfs.F(-0.05), 0.0, 1e-6);
  EXPECT_NEAR(cdfs.F(0.05), 1.0, 1e-6);
}

TEST(CdfsFromProfile, NonConvexProfileIsRejected) {
  const PrivacyProfile bumpy{
      [](double a) {
        const double base = std::max(0.0, 1.0 - 0.4 * a);
        return a > 1.5 && a < 2.5 ? base + 0.2 : base;
      },
      Provenance::kExact};
  EXPECT_THROW(CdfsFromProfile(bumpy), std::invalid_argument);
}

TEST(ProfileFromCdfs, GaussianTotalVariation) {
  const LossCdfPair cdfs = CdfsFromProfile(GaussianProfile(1.0));
  // TV of N(0,1) vs N(1,1) = 2 Phi(1/2) - 1.
  const double tv = 2.0 * NormalCdf(0.5) - 1.0;
  EXPECT_NEAR(ProfileFromCdfs(cdfs, 1.0, Orientation::kPQ), tv, 1e-4);
  EXPECT_NEAR(ProfileFromCdfs(cdfs, 1.0, Orientation::kQP), tv, 1e-4);
}

TEST(ProfileFromCdfs, DegeneratePairIsZeroAboveOne) {
  const PrivacyProfile floor{
      [](double a) { return std::max(0.0, 1.0 - a); }, Provenance::kExact};
  const LossCdfPair cdfs = CdfsFromProfile(floor);
  for (double alpha : {1.0, 2.0, 10.0}) {
    EXPECT_NEAR(ProfileFromCdfs(cdfs, alpha), 0.0, 2e-3);
  }
  EXPECT_DOUBLE_EQ(ProfileFromCdfs(cdfs, 0.0), 1.0);
}

TEST(ProfileFromCdfs, RoundTripThroughCdfs) {
  // profile -> CDFs -> profile is the identity within grid tolerance, for
  // both the Gaussian and the (kinked) randomized-response profile.
  const PrivacyProfile gauss = GaussianProfile(1.0);
  const LossCdfPair gauss_cdfs = CdfsFromProfile(gauss);
  const PrivacyProfile rr = RrProfile(0.75);
  const LossCdfPair rr_cdfs = CdfsFromProfile(rr);
  for (int i = 0; i < 20; ++i) {
    const double eps = -2.0 + 4.0 * i / 19.0;
    const double alpha = std::exp(eps);
    EXPECT_NEAR(ProfileFromCdfs(gauss_cdfs, alpha), gauss(alpha), 2e-3)
        << "gauss eps=" << eps;
    EXPECT_NEAR(ProfileFromCdfs(rr_cdfs, alpha), rr(alpha), 2e-3)
        << "rr eps=" << eps;
  }
}

TEST(ProfileFromCdfs, RoundTripAtEulerAlpha) {
  const LossCdfPair cdfs = CdfsFromProfile(GaussianProfile(1.0));
  EXPECT_NEAR(ProfileFromCdfs(cdfs, kE), GaussianProfile(1.0)(kE), 1e-3);
}

TEST(TradeoffFromCdfs, GaussianTradeoffValues) {
  const LossCdfPair cdfs = CdfsFromProfile(GaussianProfile(1.0));
  EXPECT_NEAR(TradeoffFromCdfs(cdfs, 0.5), NormalCdf(-1.0), 1e-3);
  EXPECT_NEAR(TradeoffFromCdfs(cdfs, NormalCdf(-0.5)), NormalCdf(-0.5), 1e-3);
}

TEST(TradeoffFromCdfs, DegeneratePairIsBlindTestingLine) {
  const PrivacyProfile floor{
      [](double a) { return std::max(0.0, 1.0 - a); }, Provenance::kExact};
  const LossCdfPair cdfs = CdfsFromProfile(floor);
  for (double x : {0.1, 0.3, 0.7, 0.9}) {
    EXPECT_NEAR(TradeoffFromCdfs(cdfs, x), 1.0 - x, 2e-3);
  }
}

TEST(TradeoffFromCdfs, OutputIsConvexAndBelowDiagonal) {
  const LossCdfPair cdfs = CdfsFromProfile(GaussianProfile(1.0));
  std::vector<double> values(101);
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    values[i] = TradeoffFromCdfs(cdfs, x);
    EXPECT_LE(values[i], 1.0 - x + 1e-9);
  }
  for (int i = 1; i < 100; ++i) {
    EXPECT_LE(values[i], 0.5 * (values[i - 1] + values[i + 1]) + 1e-9);
  }
}

TEST(ProfileFromTradeoff, BlindTestingLineGivesZero) {
  const TradeoffFn blind{[](double x) { return 1.0 - x; }, nullptr};
  for (double eps : {0.0, 0.5, 2.0}) {
    EXPECT_NEAR(ProfileFromTradeoff(blind, eps).value, 0.0, 1e-9);
  }
}

TEST(ProfileFromTradeoff, PaperGoldenValues) {
  EXPECT_NEAR(ProfileFromTradeoff(GaussianTradeoff(1.0), 0.277).value, 0.300,
              2e-3);
  const double p = kE / (1.0 + kE);
  // TV of RR = (e-1)/(e+1) ~ 0.462.
  EXPECT_NEAR(ProfileFromTradeoff(RrTradeoff(p), 0.0).value,
              (kE - 1.0) / (kE + 1.0), 1e-3);
}

TEST(TradeoffFromProfile, PureDpProfileGivesLine) {
  const PrivacyProfile pure{
      [](double a) { return std::max(0.0, 1.0 - a); }, Provenance::kExact};
  for (double x : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(TradeoffFromProfile(pure, x), 1.0 - x, 1e-6);
  }
}

TEST(TradeoffFromProfile, GaussianOracle) {
  EXPECT_NEAR(TradeoffFromProfile(GaussianProfile(1.0), 0.5), NormalCdf(-0.5),
              2e-3);
}

TEST(TradeoffFromProfile, RoundTripWithConjugate) {
  // tradeoff -> profile -> tradeoff on the Gaussian is the identity.
  const PrivacyProfile via_conjugate{
      [](double alpha) {
        return ProfileFromTradeoff(GaussianTradeoff(1.0),
                                   std::log(std::max(alpha, 1e-300)))
            .value;
      },
      Provenance::kExact};
  const TradeoffFn exact = GaussianTradeoff(1.0);
  for (double x : {0.1, 0.25, 0.5, 0.75}) {
    EXPECT_NEAR(TradeoffFromProfile(via_conjugate, x), exact.f(x), 2e-3);
  }
}

TEST(PhiFromTradeoff, GaussianClosedForm) {
  const PhiPair p1 = PhiFromTradeoff(GaussianTradeoff(1.0), 1.0);
  // phi(t) = e^{-(t^2 - it)/2} at t=1.
  const std::complex<double> want1 = std::exp(std::complex<double>(-0.5, 0.5));
  EXPECT_NEAR(std::abs(p1.phi - want1), 0.0, 1e-4);
  EXPECT_NEAR(std::abs(p1.phi_prime - want1), 0.0, 1e-4);

  const PhiPair p2 = PhiFromTradeoff(GaussianTradeoff(2.0), 2.0);
  // phi(t) = e^{-(t^2 - it)/8} at t=2.
  const std::complex<double> want2 = std::exp(std::complex<double>(-0.5, 0.25));
  EXPECT_NEAR(std::abs(p2.phi - want2), 0.0, 1e-4);
}

TEST(PhiFromTradeoff, UnitMassAtZero) {
  const PhiPair p = PhiFromTradeoff(GaussianTradeoff(1.0), 0.0);
  EXPECT_NEAR(p.phi.real(), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(p.phi.imag()), 0.0, 1e-10);
}

TEST(PhiFromTradeoff, DegenerateSlopeIsRejected) {
  // A trade-off flat on [1/2, 1] has |f'| = 0 on positive measure: the mass
  // at infinity must be handled by the caller.
  const TradeoffFn flat{
      [](double x) { return std::max(0.0, 1.0 - 2.0 * x); }, nullptr};
  EXPECT_THROW(PhiFromTradeoff(flat, 1.0), std::invalid_argument);
}

TEST(GFromF, ExactOnRandomizedResponseAtoms) {
  const DiscretePair pair = RrPair(0.75);
  const double l0 = std::log(3.0);
  // G is the loss CDF under Q: atoms (+l0, 0.25) and (-l0, 0.75).
  EXPECT_NEAR(GFromF(pair, -l0 - 0.1), 0.0, 1e-15);
  EXPECT_NEAR(GFromF(pair, 0.0), 0.75, 1e-15);
  EXPECT_NEAR(GFromF(pair, l0 + 0.1), 1.0, 1e-15);
}

TEST(GFromF, PointMassAtZeroIsFixed) {
  const auto step = [](double t) { return t < 0.0 ? 0.0 : 1.0; };
  EXPECT_NEAR(GFromF(step, 1.0), 1.0, 1e-6);
}

TEST(GFromF, TiltedNormalIdentity) {
  const auto F = [](double t) { return NormalCdf(t - 0.5); };
  EXPECT_NEAR(GFromF(F, 0.5), NormalCdf(1.0), 1e-3);
}

TEST(GFromF, DivergentTiltIsReported) {
  // A heavy lower tail makes the e^{-t} tilt non-integrable.
  const auto heavy = [](double t) {
    return std::exp(0.5 * t) / (1.0 + std::exp(0.5 * t));
  };
  EXPECT_THROW(GFromF(heavy, 0.0), NumericalError);
}

TEST(Profiles, ProducedProfilesAreValidOnGrid) {
  // Nonincreasing and above the (1 - alpha)_+ floor on a 200-point grid.
  for (const PrivacyProfile& profile :
       {GaussianProfile(1.0), GaussianProfile(2.0, 3), RrProfile(0.75),
        RrProfile(0.52)}) {
    double prev = profile(0.0);
    EXPECT_NEAR(prev, 1.0, 1e-12);
    for (int i = 1; i < 200; ++i) {
      const double alpha = std::exp(-6.0 + 12.0 * i / 199.0);
      const double cur = profile(alpha);
      EXPECT_LE(cur, prev + 1e-12);
      EXPECT_GE(cur, std::max(0.0, 1.0 - alpha) - 1e-12);
      prev = cur;
    }
  }
}

}  // namespace
}  // namespace afa
