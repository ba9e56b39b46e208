#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lightcone/field.hpp"

#include <filesystem>
#include <random>

using namespace lightcone;

namespace {

SampledField random_field(const GridSpec& spec, std::uint64_t seed) {
  SampledField f = zero_field(spec);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> unif(0.0, 1.0);
  for (std::int64_t i = 0; i < f.values.size(); ++i) f.values[i] = unif(rng);
  return f;
}

}  // namespace

TEST_CASE("lp_norm: constant field on the unit box") {
  // f = 1 on [-1,1]^2 (n = 1): ||f||_2 = volume^{1/2} = 2
  GridSpec spec{1, 1.0, 1.0, 32};
  SampledField f = zero_field(spec);
  f.values.setOnes();
  CHECK(lp_norm(f, 2.0) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("lp_norm: homogeneity") {
  GridSpec spec{2, 1.5, 1.0, 12};
  const SampledField f = random_field(spec, 3);
  SampledField g = f;
  g.values *= 3.0;
  for (Real p : {1.0, 1.5, 2.0, 4.0})
    CHECK(lp_norm(g, p) == doctest::Approx(3.0 * lp_norm(f, p)).epsilon(1e-12));
}

TEST_CASE("lp_norm: centered Gaussian against the analytic integral") {
  // exp(-|z|^2 / 2) on R^2 has L^2 norm sqrt(pi); the box is wide enough
  // that the truncated tail is below 1e-6
  GridSpec spec{1, 6.0, 6.0, 128};
  const SampledField f = make_test_field(TestFieldKind::gaussian, spec);
  CHECK(lp_norm(f, 2.0) ==
        doctest::Approx(1.7724538509055160).epsilon(1e-6));
}

TEST_CASE("lp_norm is monotone and refines at first order") {
  GridSpec spec{1, 2.0, 2.0, 16};
  const SampledField f = random_field(spec, 5);
  SampledField g = f;
  g.values += 0.25;
  CHECK(lp_norm(f, 3.0) <= lp_norm(g, 3.0));

  // smooth field: halving the spacing shrinks successive differences
  std::vector<Real> norms;
  for (int m : {32, 64, 128}) {
    GridSpec s{1, 4.0, 4.0, m};
    norms.push_back(lp_norm(make_test_field(TestFieldKind::gaussian, s), 2.0));
  }
  const Real d1 = std::abs(norms[1] - norms[0]);
  const Real d2 = std::abs(norms[2] - norms[1]);
  CHECK(d2 <= 0.75 * d1 + 1e-12);
}

TEST_CASE("lp_norm rejects p < 1") {
  GridSpec spec{1, 1.0, 1.0, 8};
  CHECK_THROWS_AS(lp_norm(zero_field(spec), 0.5), std::invalid_argument);
}

TEST_CASE("dilate: identity, norm scaling, support scaling") {
  GridSpec spec{1, 4.0, 4.0, 64};
  const SampledField f = make_test_field(TestFieldKind::gaussian, spec);

  const SampledField same = dilate(f, 1.0);
  CHECK((same.values - f.values).abs().maxCoeff() == 0.0);

  // ||f_lambda||_p = lambda^{-(n+1)/p} ||f||_p; node-to-node resampling
  // makes this exact up to round-off
  for (Real lambda : {2.0, 4.0}) {
    const SampledField fl = dilate(f, lambda);
    for (Real p : {1.5, 2.0})
      CHECK(lp_norm(fl, p) ==
            doctest::Approx(std::pow(lambda, -2.0 / p) * lp_norm(f, p))
                .epsilon(1e-12));
  }

  // indicator of the unit ball dilates to the ball of radius 1/2
  TestFieldParams params;
  params.radius = 1.0;
  const SampledField ball =
      make_test_field(TestFieldKind::ball_indicator, spec, params);
  const SampledField half = dilate(ball, 2.0);
  for (std::int64_t ix = 0; ix < spec.m; ++ix)
    for (std::int64_t it = 0; it < spec.m; ++it) {
      const Real x = half.spec.x_coord(ix);
      const Real t = half.spec.t_coord(it);
      const Real r2 = x * x + t * t;
      const Real expected = r2 <= 0.25 ? 1.0 : 0.0;
      if (std::abs(std::sqrt(r2) - 0.5) > half.spec.hx())  // off the rim
        CHECK(half.values[ix * spec.m + it] == expected);
    }

  CHECK_THROWS_AS(dilate(f, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dilate(f, -2.0), std::invalid_argument);
}

TEST_CASE("dilate composes") {
  GridSpec spec{1, 4.0, 4.0, 48};
  const SampledField f = make_test_field(TestFieldKind::gaussian, spec);
  const SampledField a = dilate(dilate(f, 2.0), 3.0);
  const SampledField b = dilate(f, 6.0);
  CHECK(a.spec.L == doctest::Approx(b.spec.L).epsilon(1e-15));
  CHECK((a.values - b.values).abs().maxCoeff() == 0.0);
}

TEST_CASE("make_test_field: bundled kinds") {
  GridSpec spec{1, 2.0, 2.0, 64};

  const SampledField ball = make_test_field(TestFieldKind::ball_indicator, spec);
  // value 1 at the node nearest the origin
  const std::int64_t mid = spec.m / 2;
  CHECK(ball.values[mid * spec.m + mid] == 1.0);

  const SampledField gauss = make_test_field(TestFieldKind::gaussian, spec);
  CHECK((gauss.values > 0.0).all());

  TestFieldParams params;
  params.cell = CellIndex{2, 1};
  const SampledField bump =
      make_test_field(TestFieldKind::cone_bump, spec, params);
  CHECK(bump.values.sum() > 0.0);
  // every nonzero node classifies into the requested cell
  for (std::int64_t ix = 0; ix < spec.m; ++ix)
    for (std::int64_t it = 0; it < spec.m; ++it) {
      if (bump.values[ix * spec.m + it] == 0.0) continue;
      ConePoint p;
      p.y.resize(1);
      p.y[0] = spec.x_coord(ix);
      p.s = spec.t_coord(it);
      const auto cell = classify(p);
      REQUIRE(cell.has_value());
      CHECK(cell->ell == 2);
      CHECK(cell->j == 1);
    }

  const SampledField check = make_test_field(TestFieldKind::checkerboard, spec);
  CHECK(((check.values == 0.0) || (check.values == 1.0)).all());
  CHECK(check.values.sum() > 0.0);

  CHECK_THROWS_AS(parse_field_kind("triangle"), std::invalid_argument);
}

TEST_CASE("field serialization round trips bit-exactly") {
  GridSpec spec{2, 1.25, 2.5, 10};
  const SampledField f = random_field(spec, 11);
  const auto path =
      std::filesystem::temp_directory_path() / "lightcone_field_test.lcf";
  save_field(f, path);
  const SampledField g = load_field(path);
  CHECK(g.spec == f.spec);
  REQUIRE(g.values.size() == f.values.size());
  for (std::int64_t i = 0; i < f.values.size(); ++i)
    CHECK(g.values[i] == f.values[i]);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_field("/nonexistent/field.lcf"), std::runtime_error);
}

TEST_CASE("validate_field rejects negative and non-finite values") {
  GridSpec spec{1, 1.0, 1.0, 8};
  SampledField f = zero_field(spec);
  f.values[3] = -1.0;
  CHECK_THROWS_AS(validate_field(f), std::invalid_argument);
  f.values[3] = std::numeric_limits<Real>::infinity();
  CHECK_THROWS_AS(validate_field(f), std::invalid_argument);
}
