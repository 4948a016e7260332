#include <gtest/gtest.h>

#include <random>

#include "calderon/beltrami.hpp"
#include "calderon/maps.hpp"
#include "oracles.hpp"

using namespace calderon;

TEST(CloakMap, BoundaryIdentityAndExamples) {
  const auto F0 = cloak_map_F0();
  for (double th = 0.1; th < 2 * pi; th += 0.7) {
    const cplx z = std::polar(2.0, th);
    EXPECT_LT(std::abs(F0.eval(z) - z), 1e-14);
  }
  EXPECT_NEAR(std::abs(F0.eval(cplx(1.0, 0.0)) - cplx(1.5, 0.0)), 0.0, 1e-15);
  EXPECT_THROW(F0.eval(cplx(0.0, 0.0)), domain_error);
}

TEST(CloakMap, RoundTrip) {
  const auto F0 = cloak_map_F0();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    cplx z(2.0 * U(rng), 2.0 * U(rng));
    if (std::abs(z) < 1e-3 || std::abs(z) > 2.0) continue;
    EXPECT_LT(std::abs(F0.inverse(F0.eval(z)) - z), 1e-12);
  }
}

TEST(CloakMap, JacobianMatchesFiniteDifferences) {
  const auto F0 = cloak_map_F0();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.2, 1.9);
  for (int i = 0; i < 50; ++i) {
    const cplx z = std::polar(U(rng), 4.0 * U(rng));
    const Mat2 J = F0.jacobian(z);
    EXPECT_GT(J.det(), 0.0);
    const double h = 1e-6;
    const cplx fx = (F0.eval(z + h) - F0.eval(z - h)) / (2 * h);
    const cplx fy = (F0.eval(z + cplx(0, h)) - F0.eval(z - cplx(0, h))) / (2 * h);
    EXPECT_NEAR(J.a11, fx.real(), 1e-7);
    EXPECT_NEAR(J.a21, fx.imag(), 1e-7);
    EXPECT_NEAR(J.a12, fy.real(), 1e-7);
    EXPECT_NEAR(J.a22, fy.imag(), 1e-7);
  }
}

TEST(Pushforward, IdentityMapLeavesSigma) {
  const auto sigma = ConductivityField::isotropic(
      [](cplx z) { return 1.0 + 0.5 * std::exp(-std::norm(z)); }, 2.0);
  const auto moved = pushforward(sigma, PlaneMap::identity());
  for (double x : {0.1, 0.5, 1.2}) {
    EXPECT_NEAR(moved.at(cplx(x, -x)).a11, sigma.at(cplx(x, -x)).a11, 1e-14);
  }
}

TEST(Pushforward, CloakClosedFormAndDetIdentity) {
  const auto F0 = cloak_map_F0();
  const auto tilde = pushforward(ConductivityField::identity(), F0);
  const auto closed = make_cloak();
  for (double rho : {1.2, 1.5, 1.9}) {
    for (double th : {0.0, 1.1, 3.9}) {
      const cplx y = std::polar(rho, th);
      const Sym2 a = tilde.at(y), b = closed.at(y);
      EXPECT_NEAR(a.a11, b.a11, 1e-11);
      EXPECT_NEAR(a.a12, b.a12, 1e-11);
      EXPECT_NEAR(a.a22, b.a22, 1e-11);
      // det transfer (pushforward preserves the determinant field)
      EXPECT_NEAR(a.det(), 1.0, 1e-11);
    }
  }
  EXPECT_THROW(tilde.at(cplx(0.5, 0.0)), domain_error);  // inside the cloaked region
}

TEST(Pushforward, DetTransferRandomRadialMap) {
  // det(F_* sigma)(y) = det sigma(F^{-1}(y)) for a smooth radial test map.
  const auto G = PlaneMap::radial([](double s) { return s + 0.3 * std::sin(pi * s / 2) * s * (2 - s) / 2; },
                                  [](double s) {
                                    const double t = pi * s / 2;
                                    return 1.0 + 0.3 * ((std::cos(t) * pi / 2) * s * (2 - s) / 2 +
                                                        std::sin(t) * (2 - 2 * s) / 2);
                                  },
                                  [](double) -> double {
                                    throw domain_error("inverse not needed here");
                                  },
                                  true);
  const auto sigma = ConductivityField::isotropic(
      [](cplx z) { return 1.0 + 0.3 * z.real() * z.real(); }, 2.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.1, 1.9);
  for (int i = 0; i < 200; ++i) {
    const cplx x = std::polar(U(rng), 4.0 * U(rng));
    const Mat2 DF = G.jacobian(x);
    const double J = DF.det();
    ASSERT_GT(J, 0.0);
    const Mat2 t = DF * sigma.at(x).full() * DF.transpose();
    const Sym2 pf{t.a11 / J, 0.5 * (t.a12 + t.a21) / J, t.a22 / J};
    EXPECT_NEAR(pf.det(), sigma.at(x).det(), 1e-10 * std::abs(pf.det()));
  }
}

// ---------------------------------------------------------------------------

TEST(BlowupMap, NormalizationAndMonotonicity) {
  for (const auto& w : {WeightGauge::log_weight(1.0), WeightGauge::sublinear(0.5)}) {
    const auto F = iwaniec_martin_map(w);
    EXPECT_NEAR(std::abs(F.eval(cplx(2.0, 0.0))), 2.0, 1e-10);  // rho(2) = 2
    double prev = 1.0;
    for (double s = 1e-6; s <= 2.0; s *= 3.0) {
      const double r = std::abs(F.eval(cplx(s, 0.0)));
      EXPECT_GT(r, prev);
      EXPECT_GT(r, 1.0);
      prev = r;
    }
  }
}

TEST(BlowupMap, InnerLimitForStronglySublinearWeight) {
  // For A(t) = log t the phase integral tail decays like e^{-a}, so
  // rho(s) -> 1 is visible at s = 1e-8 to 1e-6.
  const auto F = iwaniec_martin_map(WeightGauge::log_weight(1.0));
  EXPECT_NEAR(std::abs(F.eval(cplx(1e-8, 0.0))), 1.0, 1e-6);
}

TEST(BlowupMap, InnerLimitMonotoneForBorderlineWeight) {
  // The sublinear(eps) family approaches 1 only double-logarithmically;
  // check the monotone decay of rho(s) - 1 along a deep ladder.
  const BlowupProfile prof(WeightGauge::sublinear(0.5), 1.0);
  double prev = 1e300;
  for (double s : {1e-2, 1e-4, 1e-8, 1e-16, 1e-32, 1e-64}) {
    const double gap = prof.rho(s) - 1.0;
    EXPECT_GT(gap, 0.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

TEST(BlowupMap, RejectsNonSublinearWeight) {
  EXPECT_THROW(iwaniec_martin_map(WeightGauge::almost_linear()), convergence_error);
  EXPECT_THROW(iwaniec_martin_map(WeightGauge::affine(1.0)), convergence_error);
}

TEST(BlowupMap, RoundTrip) {
  const auto F = iwaniec_martin_map(WeightGauge::log_weight(1.0));
  for (double s : {0.01, 0.3, 1.0, 1.7}) {
    const cplx z = std::polar(s, 0.4 * s);
    EXPECT_LT(std::abs(F.inverse(F.eval(z)) - z), 1e-9 * std::max(1.0, s));
  }
}

TEST(Hologram, DetOneAndDistortionIdentity) {
  const auto w = WeightGauge::log_weight(1.0);
  const auto sigma1 = hologram_conductivity(w);
  const auto F1 = iwaniec_martin_map(w, 4.0);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const cplx z = std::polar(0.01 + 1.98 * U(rng), 2 * pi * U(rng));
    EXPECT_NEAR(sigma1.at(z).det(), 1.0, 1e-10);
  }
  // K_{sigma1}(z) equals the distortion of F1^{-1} at y = F1(z).
  for (double s : {0.05, 0.4, 1.3}) {
    const cplx z(s, 0.0);
    const auto rep = spectral(sigma1, z);
    const Mat2 DG = F1.inverted().jacobian(F1.eval(z));
    const double op = DG.norm();
    const double min_sv = std::abs(DG.det()) / op;
    EXPECT_NEAR(rep.k_sigma, op / min_sv, 1e-7 * rep.k_sigma);
  }
}

TEST(Hologram, MatchesGenericPushforwardRoute) {
  const auto w = WeightGauge::log_weight(1.0);
  const auto sigma1 = hologram_conductivity(w);
  const auto via_pushforward =
      pushforward(ConductivityField::identity(), iwaniec_martin_map(w, 4.0).inverted());
  for (double s : {0.1, 0.7, 1.5}) {
    const cplx z = std::polar(s, 1.0 + s);
    const Sym2 a = sigma1.at(z), b = via_pushforward.at(z);
    EXPECT_NEAR(a.a11, b.a11, 1e-7 * std::abs(a.a11) + 1e-9);
    EXPECT_NEAR(a.a12, b.a12, 1e-7 * std::abs(a.a12) + 1e-9);
    EXPECT_NEAR(a.a22, b.a22, 1e-7 * std::abs(a.a22) + 1e-9);
  }
}

TEST(Maps, DistortionEqualityOnRadialMaps) {
  // ||DF||^2 = K(z,F) J(z,F) at differentiability samples.
  const auto F = iwaniec_martin_map(WeightGauge::log_weight(1.0));
  for (double s : {0.1, 0.5, 1.2, 1.9}) {
    const Mat2 J = F.jacobian(std::polar(s, 0.3));
    const double op = J.norm();
    const double det = J.det();
    const double K = op * op / det;  // = smax/smin for 2x2 with positive det
    EXPECT_NEAR(op * op, K * det, 1e-10 * op * op);
    EXPECT_GE(K, 1.0 - 1e-12);
  }
}

TEST(Maps, InverseGradientBound) {
  // ||DF^{-1}||^2_{L^2} <= 2 ||K_F||_{L^1} on the truncated annulus.
  const auto w = WeightGauge::log_weight(1.0);
  const BlowupProfile prof(w, 1.0);
  const double delta = 1e-3;
  const long double lhs = 2.0L * oracle::PI_L *
      oracle::romberg(
          [&](long double ls) {
            const double s = (double)std::exp(ls);
            const double rho = prof.rho(s), dr = prof.drho(s);
            const double nrm = std::max(1.0 / dr, s / rho);
            return (long double)(nrm * nrm * rho * dr * s);  // dm(y), u-substituted
          },
          std::log((long double)delta), std::log(2.0L));
  const long double rhs = 2.0L * 2.0L * oracle::PI_L *
      oracle::romberg(
          [&](long double ls) {
            const double s = (double)std::exp(ls);
            const double rho = prof.rho(s), dr = prof.drho(s);
            const double K = std::max(s * dr / rho, rho / (s * dr));
            return (long double)(K * s * s);
          },
          std::log((long double)delta), std::log(2.0L));
  EXPECT_LE((double)lhs, (double)rhs);
}

// ---------------------------------------------------------------------------

TEST(Beltrami, DictionaryExamples) {
  const auto c0 = beltrami_from_sigma(Sym2::identity());
  EXPECT_NEAR(std::abs(c0.mu), 0.0, 1e-15);
  EXPECT_NEAR(c0.nu, 0.0, 1e-15);

  for (double g : {0.3, 1.0, 2.5}) {
    const auto c = beltrami_from_sigma(Sym2::diag(g, g));
    EXPECT_NEAR(std::abs(c.mu), 0.0, 1e-15);
    EXPECT_NEAR(c.nu, (1.0 - g) / (1.0 + g), 1e-14);
  }
}

TEST(Beltrami, RoundTrips) {
  oracle::RandomSpd spd(21);
  for (int i = 0; i < 300; ++i) {
    const auto m = spd(0.05, 20.0);
    const Sym2 s{m[0], m[1], m[2]};
    const auto c = beltrami_from_sigma(s);
    ASSERT_LT(std::abs(c.mu) + std::abs(c.nu), 1.0);
    const Sym2 back = sigma_from_beltrami(c.mu, c.nu);
    EXPECT_NEAR(back.a11, s.a11, 1e-11 * (1 + std::abs(s.a11)));
    EXPECT_NEAR(back.a12, s.a12, 1e-11 * (1 + std::abs(s.a12)));
    EXPECT_NEAR(back.a22, s.a22, 1e-11 * (1 + std::abs(s.a22)));
  }
  EXPECT_THROW(sigma_from_beltrami(cplx(0.7, 0.0), 0.4), domain_error);
}

TEST(Beltrami, DistortionIdentities) {
  EXPECT_DOUBLE_EQ(K_mu_nu(cplx(0, 0), cplx(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(K_mu_nu(cplx(0.5, 0), cplx(0, 0)), 3.0);
  EXPECT_TRUE(std::isinf(K_mu_nu(cplx(0.6, 0), cplx(0.4, 0))));
  oracle::RandomSpd spd(23);
  for (int i = 0; i < 200; ++i) {
    const auto m = spd(0.1, 10.0);
    const Sym2 s{m[0], m[1], m[2]};
    const auto c = beltrami_from_sigma(s);
    EXPECT_NEAR(K_mu_nu(c.mu, c.nu), spectral(s).K, 1e-9 * spectral(s).K);
  }
}

TEST(Beltrami, IsothermalMuHat) {
  EXPECT_NEAR(std::abs(isothermal_mu_hat(Sym2::identity())), 0.0, 1e-15);
  const Sym2 aniso = Sym2::diag(4.0, 0.25);
  const cplx mh = isothermal_mu_hat(aniso);
  EXPECT_NEAR(mh.real(), 0.6, 1e-12);
  EXPECT_NEAR(mh.imag(), 0.0, 1e-12);
  const double Kmh = (1 + std::abs(mh)) / (1 - std::abs(mh));
  EXPECT_NEAR(Kmh, spectral(aniso).K, 1e-10);
  // |mu-hat| is rotation invariant.  In general K_{mu-hat} equals the
  // anisotropy k_sigma = sqrt(l1/l2); it coincides with the ellipticity K
  // exactly on the det = 1 normalization (as in the example above).
  oracle::RandomSpd spd(29);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(0.0, 2 * pi);
  for (int i = 0; i < 200; ++i) {
    const auto m = spd(0.2, 8.0);
    const Sym2 s{m[0], m[1], m[2]};
    EXPECT_NEAR(std::abs(isothermal_mu_hat(rotate(s, U(rng)))),
                std::abs(isothermal_mu_hat(s)), 1e-11);
    const double a = std::abs(isothermal_mu_hat(s));
    EXPECT_NEAR((1 + a) / (1 - a), spectral(s).k_sigma, 1e-9 * spectral(s).k_sigma);
    const Sym2 unit_det = (1.0 / std::sqrt(s.det())) * s;
    const double au = std::abs(isothermal_mu_hat(unit_det));
    EXPECT_NEAR((1 + au) / (1 - au), spectral(unit_det).K, 1e-9 * spectral(unit_det).K);
  }
}
