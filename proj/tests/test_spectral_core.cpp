#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "hyperns/dense_field.hpp"
#include "hyperns/field_io.hpp"
#include "hyperns/errors.hpp"
#include "hyperns/spectral_core.hpp"
#include "support.hpp"

using namespace hyperns;
using hyperns::testing::Rng;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shell index from the defining inequalities in floating point.
int shell_by_radius(Frequency k) {
  const double r = k.norm();
  if (r <= 1.5) return 0;
  int q = 1;
  while (!(1.5 * std::ldexp(1.0, q - 1) < r && r <= 1.5 * std::ldexp(1.0, q))) ++q;
  return q;
}

SparseSpectralField single_pair(Frequency k, CVec3 v) {
  std::vector<SpectralEntry> e;
  hyperns::testing::add_pair(e, k, v);
  return SparseSpectralField(std::move(e));
}

double max_coeff_diff(const SparseSpectralField& a, const SparseSpectralField& b) {
  double worst = 0.0;
  for (const auto& e : (a - b).entries()) worst = std::max(worst, e.coeff.norm());
  return worst;
}

}  // namespace

TEST_CASE("shell_of examples") {
  CHECK(shell_of({1, 0, 0}) == 0);
  CHECK(shell_of({2, 0, 0}) == 1);
  CHECK(shell_of({15, 0, 0}) == 4);
  CHECK(shell_of({0, 0, 0}) == 0);
  CHECK(shell_of({3, 0, 0}) == 1);  // boundary |k| = 3 belongs to the lower shell
  CHECK(shell_of({0, 0, 4}) == 2);
}

TEST_CASE("shell_of agrees with the radius inequalities on a cube") {
  for (int x = -30; x <= 30; ++x)
    for (int y = -30; y <= 30; y += 3)
      for (int z = -30; z <= 30; z += 5) {
        const Frequency k{x, y, z};
        REQUIRE(shell_of(k) == shell_by_radius(k));
        const int q = shell_of(k);
        if (q >= 1) {
          CHECK(k.norm() > dyadic(q - 1));
          CHECK(k.norm() < dyadic(q + 1));
        }
      }
}

TEST_CASE("Leray symbol") {
  const Vec3 e1{1, 0, 0};
  const auto a = apply_leray(Frequency{1, 0, 0}, e1);
  CHECK(std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) == doctest::Approx(0.0));
  const auto b = apply_leray(Frequency{0, 1, 0}, e1);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.0);
  const auto id = leray_symbol({0, 0, 0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(id[i][j] == (i == j ? 1.0 : 0.0));

  Rng rng(11);
  for (int s = 0; s < 50; ++s) {
    const auto u = hyperns::testing::random_field(rng, 9, 1, false);
    const Frequency k = u.entries().front().k;
    const auto p = leray_symbol(k);
    const auto pm = leray_symbol(-k);
    for (int i = 0; i < 3; ++i) {
      double kp = 0.0;
      for (int j = 0; j < 3; ++j) {
        double p2 = 0.0;
        for (int l = 0; l < 3; ++l) p2 += p[i][l] * p[l][j];
        CHECK(p2 == doctest::Approx(p[i][j]).epsilon(1e-12));
        CHECK(p[i][j] == p[j][i]);
        CHECK(p[i][j] == pm[i][j]);
        kp += p[i][j] * k[j];
      }
      CHECK(std::abs(kp) < 1e-12 * k.norm());
    }
  }
}

TEST_CASE("project_leray: idempotent, kills gradients, output solenoidal") {
  Rng rng(12);
  for (int s = 0; s < 20; ++s) {
    const auto u = hyperns::testing::random_field(rng, 8, 30, false);
    const auto pu = project_leray(u);
    CHECK(pu.is_divergence_free(1e-12));
    CHECK(pu.is_hermitian(1e-12));
    CHECK(max_coeff_diff(project_leray(pu), pu) <= 1e-12 * pu.l2_norm());

    const auto v = hyperns::testing::random_field(rng, 8, 30, true);
    CHECK(max_coeff_diff(project_leray(v), v) <= 1e-12 * v.l2_norm());

    // i k g_hat(k) with g real.
    std::vector<SpectralEntry> grad;
    for (const auto& e : u.entries()) {
      if (!hyperns::testing::upper_half(e.k)) continue;
      const Complex g = e.coeff[0];
      CVec3 c{{Complex(0, e.k.x) * g, Complex(0, e.k.y) * g, Complex(0, e.k.z) * g}};
      hyperns::testing::add_pair(grad, e.k, c);
    }
    const auto pg = project_leray(SparseSpectralField(std::move(grad)));
    double worst = 0.0;
    for (const auto& e : pg.entries()) worst = std::max(worst, e.coeff.norm());
    CHECK(worst < 1e-12 * u.l2_norm() * 20);
  }
}

TEST_CASE("Littlewood-Paley projections") {
  Rng rng(13);
  const auto shell3 = hyperns::testing::gaussian_shell_field(rng, 3);
  CHECK(lp_project(shell3, 5).empty());
  CHECK(max_coeff_diff(lp_project(shell3, 3), shell3) == 0.0);

  for (int s = 0; s < 10; ++s) {
    const auto u = hyperns::testing::random_field(rng, 23, 400);  // |k| up to 40
    int top = 0;
    for (const auto& e : u.entries()) top = std::max(top, shell_of(e.k));
    SparseSpectralField sum;
    for (int q = 0; q <= top; ++q) sum = sum + lp_project(u, q);
    CHECK((sum - u).empty());

    for (int q = 0; q <= top; ++q) {
      const auto uq = lp_project(u, q);
      const double whole = inner_product(u, uq);
      CHECK(whole == doctest::Approx(inner_product(extended_lp(u, q), uq)).epsilon(1e-12));
      CHECK(whole == doctest::Approx(uq.l2_norm2()).epsilon(1e-12));
      for (int p = 0; p <= top; ++p)
        if (p != q) CHECK(std::abs(inner_product(lp_project(u, p), uq)) <= 1e-12 * u.l2_norm2());
      SparseSpectralField ball;
      for (int p = 0; p <= q; ++p) ball = ball + lp_project(u, p);
      CHECK((ball_project(u, q) - ball).empty());
    }
  }
}

TEST_CASE("fractional multiplier") {
  Rng rng(14);
  const auto u = hyperns::testing::random_field(rng, 6, 40);
  CHECK(max_coeff_diff(fractional_multiplier(u, 0.0), u) == 0.0);

  const auto m = single_pair({3, 4, 0}, CVec3{{Complex(0, 0), Complex(0, 0), Complex(1, 0)}});
  CHECK(fractional_multiplier(m, 2.0).at({3, 4, 0})[2].real() == doctest::Approx(25.0));

  double direct = 0.0;
  for (const auto& e : u.entries()) direct += std::pow(e.k.norm(), 2 * 0.7) * e.coeff.norm2();
  CHECK(homogeneous_sobolev_norm2(u, 0.7) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(fractional_multiplier(u, 0.7).l2_norm2() == doctest::Approx(direct).epsilon(1e-12));

  const auto back = fractional_multiplier(fractional_multiplier(u, 1.3), -1.3);
  CHECK(max_coeff_diff(back, u) <= 1e-12 * u.l2_norm());
  const auto group = fractional_multiplier(fractional_multiplier(u, 0.4), 0.9);
  CHECK(max_coeff_diff(group, fractional_multiplier(u, 1.3)) <= 1e-12 * group.l2_norm());

  const auto mean = single_pair({1, 0, 0}, CVec3{{0, 1, 0}}) +
                    SparseSpectralField(std::vector<SpectralEntry>{{Frequency{0, 0, 0}, CVec3{{1, 0, 0}}}});
  CHECK_THROWS_WITH_AS(fractional_multiplier(mean, -1.0), "singular at zero frequency", std::domain_error);
  CHECK_NOTHROW(fractional_multiplier(mean, 1.0));
}

TEST_CASE("L^r norms") {
  const SparseSpectralField constant(std::vector<SpectralEntry>{{Frequency{0, 0, 0}, CVec3{{2.5, 0, 0}}}});
  for (double r : {1.0, 2.0, 3.0, 7.5, kInf}) CHECK(lr_norm(constant, r, 8) == doctest::Approx(2.5));

  const auto cosine = single_pair({1, 0, 0}, CVec3{{0.5, 0, 0}});  // (cos x1, 0, 0)
  CHECK(lr_norm(cosine, 2.0, 16) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lr_norm(cosine, kInf, 16) == doctest::Approx(1.0).epsilon(1e-14));
  // mean of cos^4 is 3/8
  CHECK(lr_norm(cosine, 4.0, 16) == doctest::Approx(std::pow(3.0 / 8.0, 0.25)).epsilon(1e-13));

  CHECK_THROWS_AS(lr_norm(cosine, 0.5, 16), std::invalid_argument);

  Rng rng(15);
  for (int s = 0; s < 5; ++s) {
    const auto uq = lp_project(hyperns::testing::random_field(rng, 12, 300), 3);
    if (uq.empty()) continue;
    const int n = 2 * uq.max_abs_frequency() + 2;
    const auto dense = DenseGridField::from_sparse(uq, n + (n % 2));
    CHECK(lr_norm(dense, 2.0) == doctest::Approx(uq.l2_norm()).epsilon(1e-10));
    CHECK(lr_norm(uq, 2.0, 32) == doctest::Approx(uq.l2_norm()).epsilon(1e-10));
    CHECK(lr_norm(uq, kInf, 64) == doctest::Approx(lr_norm(DenseGridField::from_sparse(uq, 64), kInf)));
  }
}

TEST_CASE("dense grid round trip and spectral mirror") {
  Rng rng(16);
  const auto u = hyperns::testing::random_field(rng, 7, 60);
  const auto dense = DenseGridField::from_sparse(u, 16);
  CHECK(max_coeff_diff(dense.to_sparse(1e-14), u) <= 1e-12 * u.l2_norm());

  std::array<std::vector<double>, 3> samples;
  for (int c = 0; c < 3; ++c) samples[c].assign(dense.samples(c).begin(), dense.samples(c).end());
  const auto again = DenseGridField::from_samples(16, samples);
  double worst = 0.0, scale = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < again.point_count(); ++p) {
      worst = std::max(worst, std::abs(again.samples(c)[p] - dense.samples(c)[p]));
      scale = std::max(scale, std::abs(dense.samples(c)[p]));
    }
  CHECK(worst <= 1e-12 * scale);
  for (int x = -7; x <= 7; ++x)
    for (int y = -7; y <= 7; ++y) {
      const auto a = dense.coefficient({x, y, 0});
      const auto b = dense.coefficient({-x, -y, 0});
      CHECK((a - b.conj()).norm() <= 1e-14 * (1.0 + a.norm()));
    }
}

TEST_CASE("Besov norm examples") {
  const auto mode = single_pair({2, 0, 0}, CVec3{{0, 1, 0}});
  const auto rep = besov_norm(mode, 1.0, 2.0, 4);
  CHECK(rep.per_shell.size() == 5);
  CHECK(rep.per_shell[1] == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(rep.value == doctest::Approx(2.0 * std::sqrt(2.0)));

  Rng rng(17);
  const auto u = hyperns::testing::random_field(rng, 10, 200);
  const auto flat = besov_norm(u, 0.0, 2.0, 6);
  CHECK(flat.value <= u.l2_norm());
}

TEST_CASE("Bernstein ratio") {
  // 2 cos(k.x) e2 with k in shell 2: |u|_2 = sqrt 2, |u|_4 = 6^{1/4}, |u|_inf = 2.
  const auto mode = single_pair({5, 0, 1}, CVec3{{0, 1, 0}});
  REQUIRE(shell_of({5, 0, 1}) == 2);
  CHECK(bernstein_ratio(mode, 2.0, 4.0) ==
        doctest::Approx(std::pow(6.0, 0.25) / (std::sqrt(2.0) * std::pow(4.0, 0.75))).epsilon(1e-12));
  CHECK(bernstein_ratio(mode, 2.0, kInf) == doctest::Approx(2.0 / (std::sqrt(2.0) * 8.0)).epsilon(1e-12));
  CHECK_THROWS_AS(bernstein_ratio(mode, 4.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(bernstein_ratio(mode + single_pair({20, 0, 0}, CVec3{{0, 1, 0}}), 2.0, 4.0),
                  std::invalid_argument);

  // Shell-5 fields on a 128^3 grid, outside the calibration shells.
  Rng rng(18);
  for (int s = 0; s < 6; ++s) {
    const auto u = s % 2 ? hyperns::testing::coherent_shell_field(rng, 5) : hyperns::testing::gaussian_shell_field(rng, 5);
    if (u.empty()) continue;
    CHECK(bernstein_ratio(u, 2.0, kInf, 128) <= kBernsteinConstant);
    CHECK(bernstein_ratio(u, 2.0, 4.0, 128) <= kBernsteinConstant);
  }
}

TEST_CASE("Bernstein calibration reproduces the frozen constant") {
  const auto cal = hyperns::testing::calibrate_bernstein(20261014, 1000);
  CHECK(cal.samples == 1000);
  CHECK(2.0 * cal.max_ratio <= kBernsteinConstant * (1.0 + 1e-9));
  CHECK(2.0 * cal.max_ratio == doctest::Approx(kBernsteinConstant).epsilon(1e-6));
}

TEST_CASE("field JSON round trip") {
  Rng rng(19);
  const auto u = hyperns::testing::random_field(rng, 5, 20);
  const json doc = field_to_json(u, 1.0);
  CHECK(doc["header"]["convention"] == "sharp-1.5");
  CHECK(doc["header"]["normalization"] == "normalized-measure");
  const auto back = field_from_json(json::parse(doc.dump()));
  CHECK(max_coeff_diff(back, u) == 0.0);
  CHECK_THROWS_AS(field_from_json(json::parse(R"({"header":{},"modes":[[1,2]]})")), FormatError);
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}
