#include <doctest.h>

#include <cmath>
#include <limits>

#include "../support/oracles.hpp"
#include "subsel/criteria.hpp"
#include "subsel/error.hpp"
#include "subsel/rng.hpp"

using namespace subsel;

namespace {

Vector v(std::initializer_list<double> xs) {
  Vector out(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

DesignMeasure on_line(std::initializer_list<double> xs) {
  std::vector<DesignPoint> pts;
  for (double x : xs) pts.push_back({v({x}), Vector()});
  return DesignMeasure::uniform(pts);
}

Basis square() {
  return Basis("square", 1, 1, false, [](const Vector& x) { return Vector::Constant(1, x(0) * x(0)); });
}

CandidateGrid line_grid(std::size_t n) { return build_grid({{"x", linspace(-1, 1, n), false}}); }

}  // namespace

TEST_CASE("variance function examples") {
  const ModelSpec line(basis::linear(1, true));
  const DesignMeasure ends = on_line({-1, 1});
  CHECK(variance_function(line, ends, {v({1}), Vector()}) == doctest::Approx(2.0));
  CHECK(variance_function(line, ends, {v({0}), Vector()}) == doctest::Approx(1.0));
  const DesignMeasure inner = on_line({-0.5, 0.5});
  CHECK(variance_function(line, inner, {v({1}), Vector()}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(variance_function(line, on_line({0.3}), {v({0}), Vector()}), SingularMatrix);
}

TEST_CASE("f-only variance ignores bias columns") {
  const ModelSpec spec(basis::linear(1, true), square());
  const DesignMeasure d = on_line({-1, 0, 1});
  const DesignPoint x{v({0.5}), Vector()};
  const double full = variance_function(spec, d, x);
  const double f_only = variance_function_f_only(spec, d, x);
  CHECK(f_only == doctest::Approx(variance_function(spec.f_only(), d, x)));
  CHECK(full >= f_only - 1e-12);
}

TEST_CASE("classical D, A and I") {
  const ModelSpec line(basis::linear(1, true));
  const InformationMatrix m = information_matrix(line, on_line({-1, 1}));
  const CriterionValue d = d_criterion(m);
  CHECK(d.value == doctest::Approx(0.0));
  CHECK(d.meta.at("singular") == 0.0);
  CHECK(a_criterion(m).value == doctest::Approx(2.0));
  // Average of 1 + x^2 over the two-point grid.
  CHECK(i_criterion(line, on_line({-1, 1}), line_grid(2)).value == doctest::Approx(2.0));
  CHECK(i_criterion(line, on_line({-1, 1}), line_grid(3)).value == doctest::Approx(5.0 / 3.0));

  const InformationMatrix singular = information_matrix(line, on_line({0.2}));
  const CriterionValue ds = d_criterion(singular);
  CHECK(ds.value == -std::numeric_limits<double>::infinity());
  CHECK(ds.meta.at("singular") == 1.0);
}

TEST_CASE("GET check examples") {
  const ModelSpec line(basis::linear(1, true));
  const CandidateGrid grid = line_grid(51);
  const GetVerdict good = get_check(line, on_line({-1, 1}), grid, 2);
  CHECK(good.is_optimal);
  CHECK(good.max_variance == doctest::Approx(2.0));
  CHECK(good.worst_index == 0);  // tie at +-1 goes to the lowest index

  const GetVerdict bad = get_check(line, on_line({-0.5, 0.5}), grid, 2);
  CHECK_FALSE(bad.is_optimal);
  CHECK(bad.max_variance == doctest::Approx(5.0));
  CHECK(std::abs(bad.worst_point.x(0)) == doctest::Approx(1.0));

  const ModelSpec quad(basis::polynomial(1, 0, 2, true));
  const GetVerdict q = get_check(quad, on_line({-1, 0, 1}), grid);
  CHECK(q.bound == 3.0);
  CHECK(q.is_optimal);
}

TEST_CASE("GET default bound is the rank and threads do not change the verdict") {
  const ModelSpec quad(basis::polynomial(1, 0, 2, true));
  const CandidateGrid grid = line_grid(41);
  const DesignMeasure d = on_line({-1, -0.3, 0.4, 1});
  const GetVerdict one = get_check(quad, d, grid, std::nullopt, 1e-6, 1);
  const GetVerdict four = get_check(quad, d, grid, std::nullopt, 1e-6, 4);
  CHECK(one.bound == 3.0);
  CHECK(one.max_variance == four.max_variance);
  CHECK(one.worst_index == four.worst_index);
}

TEST_CASE("brute force confirms the two-point D-optimal line design") {
  const CandidateGrid grid = line_grid(51);
  double best = -1;
  Index bi = -1, bj = -1;
  for (Index i = 0; i < grid.size(); ++i) {
    for (Index j = i + 1; j < grid.size(); ++j) {
      const double a = grid.points()(i, 0), b = grid.points()(j, 0);
      const double det = oracle::det(oracle::sum_outer({v({1, a}), v({1, b})}, {0.5, 0.5}));
      if (det > best) {
        best = det;
        bi = i;
        bj = j;
      }
    }
  }
  CHECK(bi == 0);
  CHECK(bj == 50);
}

TEST_CASE("trace identity holds for arbitrary designs") {
  CounterRng rng(5);
  const ModelSpec spec(basis::polynomial(1, 0, 2, true), std::nullopt, basis::linear(1, false));
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<DesignPoint> pts;
    Vector w(6);
    for (int i = 0; i < 6; ++i) {
      pts.push_back({v({2 * rng.uniform() - 1}), v({rng.normal()})});
      w(i) = rng.uniform() + 0.05;
    }
    w /= w.sum();
    const DesignMeasure d(pts, w);
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) total += d.weight(i) * variance_function(spec, d, d.point(i));
    CHECK(total == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("Wiens losses against the defining construction") {
  Matrix f(3, 2);
  f << 1, -1, 1, 0, 1, 1;
  const RobustContext ctx(f, 0.5);
  const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
  const WiensLosses got = wiens_losses(ctx, uniform);
  const oracle::Wiens want = oracle::wiens(f, uniform, 0.5);
  CHECK(got.i_nu.value == doctest::Approx(want.i_nu).epsilon(1e-10));
  CHECK(got.d_nu.value == doctest::Approx(want.d_nu).epsilon(1e-10));

  const Vector skew = v({0.5, 0.2, 0.3});
  const WiensLosses g2 = wiens_losses(ctx, skew);
  const oracle::Wiens w2 = oracle::wiens(f, skew, 0.5);
  CHECK(g2.i_nu.value == doctest::Approx(w2.i_nu).epsilon(1e-10));
  CHECK(g2.d_nu.value == doctest::Approx(w2.d_nu).epsilon(1e-10));
  CHECK(g2.lambda == doctest::Approx(w2.lambda).epsilon(1e-10));
  CHECK(g2.eigenvector.norm() == doctest::Approx(1.0));
}

TEST_CASE("Wiens losses at nu = 0 are classical") {
  Matrix f(5, 2);
  f << 1, -1, 1, -0.5, 1, 0, 1, 0.5, 1, 1;
  const RobustContext ctx(f, 0.0);
  const Vector w = v({0.1, 0.3, 0.2, 0.25, 0.15});
  const WiensLosses l = wiens_losses(ctx, w);
  const Matrix& q = ctx.q_matrix();
  const Matrix r = q.transpose() * w.asDiagonal() * q;
  CHECK(l.i_nu.value == doctest::Approx(oracle::inverse(r).trace()).epsilon(1e-10));
  CHECK(l.d_nu.value == doctest::Approx(std::pow(oracle::det(r), -0.5)).epsilon(1e-10));
}

TEST_CASE("uniform design minimises D_1") {
  Matrix f(5, 2);
  f << 1, -1, 1, -0.5, 1, 0, 1, 0.5, 1, 1;
  const RobustContext ctx(f, 1.0);
  const double uni = wiens_losses(ctx, Vector::Constant(5, 0.2)).d_nu.value;
  CounterRng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    Vector w(5);
    for (Index i = 0; i < 5; ++i) w(i) = rng.uniform();
    w /= w.sum();
    CHECK(wiens_losses(ctx, w).d_nu.value >= uni - 1e-12);
  }
}

TEST_CASE("singular R is reported") {
  Matrix f(3, 2);
  f << 1, -1, 1, 0, 1, 1;
  const RobustContext ctx(f, 0.5);
  CHECK_THROWS_AS(wiens_losses(ctx, v({1, 0, 0})), SingularMatrix);
  CHECK_THROWS_AS(wiens_losses(ctx, v({0.5, 0.5})), InvalidInput);
}

TEST_CASE("weights on grid") {
  const ModelSpec line(basis::linear(1, true));
  const CandidateGrid grid = line_grid(5);
  const Vector w = weights_on_grid(line, grid, on_line({-1, 1}));
  CHECK(w == v({0.5, 0, 0, 0, 0.5}));
  CHECK_THROWS_AS(weights_on_grid(line, grid, on_line({-1, 0.3})), InvalidInput);
}

namespace {

struct Instance {
  InformationMatrix info;
  BiasSpec bias;
};

Instance random_instance(CounterRng& rng, Index p, Index m, Index q, int points) {
  const Index k = p + m + q;
  std::vector<oracle::Vec> rows;
  std::vector<double> w;
  for (int i = 0; i < points; ++i) {
    oracle::Vec r(k);
    r(0) = 1.0;
    for (Index j = 1; j < k; ++j) r(j) = rng.normal();
    rows.push_back(r);
    w.push_back(1.0 / points);
  }
  BiasSpec b;
  b.psi = Vector(m);
  b.phi = Vector(q);
  for (Index j = 0; j < m; ++j) b.psi(j) = rng.normal();
  for (Index j = 0; j < q; ++j) b.phi(j) = rng.normal();
  b.sigma = 0.5 + rng.uniform();
  b.n_total = 1 + rng.below(20);
  return {InformationMatrix(oracle::sum_outer(rows, w), p, m, q), b};
}

}  // namespace

TEST_CASE("trace and determinant of R against the assembled matrix") {
  CounterRng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const Index p = 1 + static_cast<Index>(rng.below(3));
    const Index m = 1 + static_cast<Index>(rng.below(3));
    const Index q = 1 + static_cast<Index>(rng.below(3));
    const int points = static_cast<int>(p + m + q) + static_cast<int>(rng.below(4));
    const Instance in = random_instance(rng, p, m, q, std::min(points, 10));
    const double c = in.bias.n_over_sigma();
    const Matrix r = oracle::direct_r(in.info.full(), p, m, q, in.bias.psi, in.bias.phi, c);
    const double tr = trace_r(in.info, in.bias).value;
    CHECK(std::abs(tr - r.trace()) <= 1e-10 * std::max(1.0, std::abs(r.trace())));

    const Matrix rb = oracle::direct_r(in.info.full(), p, m, q, in.bias.psi, Vector::Zero(q), c);
    const double db = det_r_bias(in.info, in.bias).value;
    CHECK(std::abs(db - oracle::det(rb)) <= 1e-10 * std::abs(oracle::det(rb)));
    const Matrix rc = oracle::direct_r(in.info.full(), p, m, q, Vector::Zero(m), in.bias.phi, c);
    const double dc = det_r_confounder(in.info, in.bias).value;
    CHECK(std::abs(dc - oracle::det(rc)) <= 1e-10 * std::abs(oracle::det(rc)));
  }
}

TEST_CASE("trace of R: vanishing bias, scaling, displayed cross term") {
  CounterRng rng(4);
  Instance in = random_instance(rng, 2, 1, 1, 5);
  const double base = oracle::inverse(in.info.full().topLeftCorner(2, 2)).trace();
  BiasSpec zero = in.bias;
  zero.psi.setZero();
  zero.phi.setZero();
  CHECK(trace_r(in.info, zero).value == doctest::Approx(base).epsilon(1e-12));
  CHECK(det_r_bias(in.info, zero).value == doctest::Approx(oracle::det(oracle::inverse(in.info.full().topLeftCorner(2, 2)))));

  const CriterionValue one = trace_r(in.info, in.bias);
  BiasSpec twice = in.bias;
  twice.n_total *= 2;
  const CriterionValue two = trace_r(in.info, twice);
  CHECK(two.value - base == doctest::Approx(4.0 * (one.value - base)).epsilon(1e-10));

  const CriterionValue shown = trace_r(in.info, in.bias, CrossTerm::displayed);
  const double c2 = in.bias.n_over_sigma() * in.bias.n_over_sigma();
  CHECK(one.value - shown.value == doctest::Approx(c2 * one.meta.at("trS4")));
}

TEST_CASE("orthogonal bias block gives no penalty") {
  Matrix full = Matrix::Identity(3, 3);
  full(2, 2) = 2.0;
  const InformationMatrix info(full, 2, 1, 0);
  const BiasSpec b{v({3.0}), Vector(), 1.0, 100};
  const CriterionValue d = det_r_bias(info, b);
  CHECK(d.meta.at("penalty") == 0.0);
  CHECK(d.value == doctest::Approx(1.0));
  CHECK_THROWS_AS(trace_r(info, BiasSpec{v({1, 2}), Vector(), 1.0, 1}), InvalidInput);
}

TEST_CASE("Montepiedra check") {
  const ModelSpec line(basis::linear(1, true));
  const CandidateGrid grid = line_grid(21);
  const BiasSpec none{Vector(), Vector(), 1.0, 1};
  const auto ok = montepiedra_check(line, on_line({-1, 1}), none, 0.0, 0.0, grid, 1e-9);
  CHECK(ok.holds);
  CHECK(ok.max_excess == doctest::Approx(0.0).scale(1));
  const auto bad = montepiedra_check(line, on_line({-0.5, 0.5}), none, 0.0, 0.0, grid, 1e-9);
  CHECK_FALSE(bad.holds);
  CHECK(bad.worst_index == 0);

  // Direct evaluation of the displayed inequality with h(x) = x^2, psi = 1.
  const ModelSpec biased(basis::linear(1, true), square());
  const BiasSpec bias{v({1.0}), Vector(), 1.0, 1};
  const DesignMeasure design = on_line({-1, 1});
  const auto got = montepiedra_check(biased, design, bias, 0.0, 1.0, grid, 1e-9);
  const oracle::Mat m11_inv = oracle::inverse(oracle::sum_outer({v({1, -1}), v({1, 1})}, {0.5, 0.5}));
  double worst = -1e300;
  Index worst_i = -1;
  for (Index i = 0; i < grid.size(); ++i) {
    const double x = grid.points()(i, 0);
    const oracle::Vec f = v({1, x});
    double phi_fn = 0.0;
    for (double s : {-1.0, 1.0}) phi_fn += 0.5 * f.dot(m11_inv * v({1, s}));
    const double d1 = f.dot(m11_inv * f);
    const double d2 = phi_fn * phi_fn - 2 * phi_fn * x * x;
    const double excess = d1 + d2 - 2.0;
    if (excess > worst) {
      worst = excess;
      worst_i = i;
    }
  }
  CHECK(got.max_excess == doctest::Approx(worst).epsilon(1e-12));
  CHECK(got.worst_index == worst_i);
  CHECK(got.holds == (worst <= 1e-9));
  CHECK_THROWS_AS(montepiedra_check(line, design, none, 0.0, -1.0, grid, 1e-9), InvalidInput);
}

TEST_CASE("confounder loss") {
  const ModelSpec spec(basis::linear(1, true), std::nullopt, basis::linear(1, false));
  const std::vector<Vector> xs = {v({-1}), v({0}), v({1}), v({2})};
  const std::vector<Vector> zs = {v({0.5}), v({-1}), v({2}), v({0.1})};
  const BiasSpec bias{Vector(), v({1.0}), 1.0, 4};
  oracle::Mat f(4, 2), g(4, 1);
  for (int i = 0; i < 4; ++i) {
    f.row(i) << 1, xs[i](0);
    g(i, 0) = zs[i](0);
  }
  const oracle::Mat m11_inv = oracle::inverse(f.transpose() * f / 4.0);
  const double want = (v({1.0}).transpose() * g.transpose() * f * m11_inv * m11_inv * f.transpose() * g * v({1.0}))(0, 0);
  CHECK(confounder_loss(spec, xs, zs, bias) == doctest::Approx(want).epsilon(1e-12));

  CHECK(confounder_loss(spec, xs, zs, BiasSpec{Vector(), v({0.0}), 1.0, 4}) == 0.0);
  const std::vector<Vector> zeros(4, v({0.0}));
  CHECK(confounder_loss(spec, xs, zeros, bias) == 0.0);
  CHECK_THROWS_AS(confounder_loss(spec, xs, {v({1})}, bias), InvalidInput);
}

TEST_CASE("confounder expected worst and minimax enumerate") {
  const ModelSpec spec(basis::linear(1, true), std::nullopt, basis::linear(1, false));
  const std::vector<Vector> xs = {v({-1}), v({1}), v({0})};
  const std::vector<Vector> a = {v({1}), v({-1}), v({0})};
  const std::vector<Vector> b = {v({1}), v({1}), v({1})};
  const std::vector<Vector> phis = {v({1}), v({-2})};
  auto loss = [&](const std::vector<Vector>& z, const Vector& phi) {
    return confounder_loss(spec, xs, z, BiasSpec{Vector(), phi, 1.0, 3});
  };
  const double la = std::max(loss(a, phis[0]), loss(a, phis[1]));
  const double lb = std::max(loss(b, phis[0]), loss(b, phis[1]));
  const double e = confounder_expected_worst(spec, xs, {{a, 0.25}, {b, 0.75}}, phis);
  CHECK(e == doctest::Approx(0.25 * la + 0.75 * lb));
  const ConfounderMinimax mm = confounder_minimax(spec, xs, {{{b, 1.0}}, {{a, 1.0}}}, phis);
  CHECK(mm.value == doctest::Approx(std::min(la, lb)));
  CHECK(mm.best_distribution == (la < lb ? 1u : 0u));
  CHECK_THROWS_AS(confounder_expected_worst(spec, xs, {{a, 0.5}}, phis), InvalidInput);
}

TEST_CASE("criteria are pure") {
  const ModelSpec quad(basis::polynomial(1, 0, 2, true));
  const DesignMeasure d = on_line({-1, -0.2, 0.7, 1});
  const InformationMatrix m = information_matrix(quad, d);
  CHECK(d_criterion(m).value == d_criterion(m).value);
  CHECK(get_check(quad, d, line_grid(33)).max_variance == get_check(quad, d, line_grid(33)).max_variance);
}
