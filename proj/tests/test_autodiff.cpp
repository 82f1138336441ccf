#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "vtp/autodiff.hpp"
#include "vtp/gradcheck.hpp"
#include "vtp/rng.hpp"

using namespace vtp;
using ad::Ref;
using ad::Shape;
using ad::Tape;
using ad::Tensor;

namespace {

Tensor random_tensor(const Shape& shape, Rng& rng, double lo = -2.0, double hi = 2.0) {
  Tensor t = Tensor::zeros(shape);
  for (double& x : t.v) x = rng.uniform(lo, hi);
  return t;
}

// Independent oracle: central finite differences of an arbitrary scalar
// function of one tensor, evaluated through fresh tapes.
std::vector<double> fd_gradient(Tensor& t, const std::function<Ref(Tape&)>& build, double step) {
  std::vector<double> grad(t.v.size());
  for (std::size_t i = 0; i < t.v.size(); ++i) {
    const double saved = t.v[i];
    t.v[i] = saved + step;
    Tape tp;
    const double fp = tp.value(build(tp));
    t.v[i] = saved - step;
    Tape tm;
    const double fm = tm.value(build(tm));
    t.v[i] = saved;
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

TEST_CASE("matmul values") {
  Tape t;
  const Ref id2 = t.constant({2, 2}, {1, 0, 0, 1});
  const Ref m = t.constant({2, 2}, {1, 2, 3, 4});
  const Ref prod = t.matmul(id2, m);
  CHECK(t.values(prod)[0] == 1.0);
  CHECK(t.values(prod)[1] == 2.0);
  CHECK(t.values(prod)[2] == 3.0);
  CHECK(t.values(prod)[3] == 4.0);

  const Ref proj = t.constant({2, 2}, {1, 0, 0, 0});
  const Ref col = t.constant({2, 1}, {5, 7});
  const Ref out = t.matmul(proj, col);
  CHECK(t.values(out)[0] == 5.0);
  CHECK(t.values(out)[1] == 0.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tape t;
  const Ref a = t.constant({2, 3}, std::vector<double>(6, 1.0));
  const Ref b = t.constant({2, 2}, std::vector<double>(4, 1.0));
  CHECK_THROWS_WITH_AS(t.matmul(a, b), doctest::Contains("{2,3}"), DimensionError);
  try {
    t.matmul(a, b);
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("{2,2}") != std::string::npos);
  }
}

TEST_CASE("matmul gradient of sum(A*B) wrt A equals ones*B^T") {
  Rng rng(11);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 2}, rng);

  Tape t;
  const Ref ra = t.param(a);
  const Ref rb = t.constant(b);
  const Ref loss = t.sum(t.matmul(ra, rb));
  t.backward(loss);

  // closed form: d sum(A.B) / dA[i][p] = sum_j B[p][j]
  for (int i = 0; i < 3; ++i) {
    for (int p = 0; p < 4; ++p) {
      double expect = 0.0;
      for (int j = 0; j < 2; ++j) expect += b.v[p * 2 + j];
      CHECK(a.g[i * 4 + p] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  // and against the finite-difference oracle, step 1e-5
  auto build = [&](Tape& tp) { return tp.sum(tp.matmul(tp.param(a), tp.constant(b))); };
  const auto fd = fd_gradient(a, build, 1e-5);
  for (std::size_t i = 0; i < fd.size(); ++i) CHECK(rel_err(a.g[i], fd[i]) < 1e-7);
}

TEST_CASE("elementwise values") {
  Tape t;
  const Ref r = t.relu(t.constant({3}, {-1, 0, 2}));
  CHECK(t.values(r)[0] == 0.0);
  CHECK(t.values(r)[1] == 0.0);
  CHECK(t.values(r)[2] == 2.0);

  CHECK(t.value(t.tanh(t.scalar(0.0))) == 0.0);

  const Ref a = t.constant({2}, {1, 2});
  const Ref bad = t.constant({3}, {1, 2, 3});
  CHECK_THROWS_AS(t.add(a, bad), DimensionError);
  CHECK_THROWS_AS(t.mul(a, bad), DimensionError);
}

TEST_CASE("sigmoid gradient at 0 is 0.25") {
  Tensor w = Tensor::zeros({1});
  Tape t;
  const Ref loss = t.sigmoid(t.param(w));
  t.backward(loss);
  CHECK(w.g[0] == doctest::Approx(0.25).epsilon(1e-12));

  auto build = [&](Tape& tp) { return tp.sigmoid(tp.param(w)); };
  const auto fd = fd_gradient(w, build, 1e-5);
  CHECK(rel_err(w.g[0], fd[0]) < 1e-9);
}

TEST_CASE("softmax") {
  Tape t;
  SUBCASE("shift invariance for constant input") {
    for (double c : {-7.5, 0.0, 3.25}) {
      const Ref y = t.softmax(t.constant({3}, {c, c, c}));
      for (double v : t.values(y)) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
  }
  SUBCASE("no overflow for large inputs") {
    const Ref y = t.softmax(t.constant({2}, {1000.0, 1000.0}));
    CHECK(t.values(y)[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t.values(y)[1] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("closed form [0, ln 3]") {
    const Ref y = t.softmax(t.constant({2}, {0.0, std::log(3.0)}));
    CHECK(t.values(y)[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(t.values(y)[1] == doctest::Approx(0.75).epsilon(1e-14));
  }
  SUBCASE("empty input rejected") {
    const Ref e = t.constant({0}, {});
    CHECK_THROWS_AS(t.softmax(e), DimensionError);
  }
}

TEST_CASE("softmax sum and shift invariance properties") {
  Rng rng(23);
  for (int it = 0; it < 100; ++it) {
    const int n = 1 + static_cast<int>(rng.integer(8));
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-30.0, 30.0);
    const double shift = rng.uniform(-100.0, 100.0);
    std::vector<double> xs(x);
    for (double& v : xs) v += shift;

    Tape t;
    const auto y = t.values(t.softmax(t.constant({n}, x)));
    const auto ys = t.values(t.softmax(t.constant({n}, xs)));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(y[i] >= 0.0);
      sum += y[i];
      CHECK(std::abs(y[i] - ys[i]) < 1e-9);
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("concat") {
  Tape t;
  const Ref c = t.concat(t.constant({1}, {1}), t.constant({2}, {2, 3}));
  CHECK(t.shape(c) == Shape{3});
  CHECK(t.values(c)[0] == 1.0);
  CHECK(t.values(c)[1] == 2.0);
  CHECK(t.values(c)[2] == 3.0);

  const Ref e = t.concat(t.constant({0}, {}), t.constant({1}, {5}));
  CHECK(t.shape(e) == Shape{1});
  CHECK(t.values(e)[0] == 5.0);

  CHECK_THROWS_AS(t.concat(t.constant({1, 1}, {1}), t.constant({1}, {1})), DimensionError);
}

TEST_CASE("concat gradient routing") {
  Tensor a = Tensor::zeros({1});
  Tensor b = Tensor::zeros({2});
  a.v = {1.0};
  b.v = {2.0, 3.0};
  Tape t;
  const Ref c = t.concat(t.param(a), t.param(b));
  // loss = [g1,g2,g3] . c with upstream weights 10, 20, 30
  const Ref loss = t.dot(t.constant({3}, {10, 20, 30}), c);
  t.backward(loss);
  CHECK(a.g[0] == 10.0);
  CHECK(b.g[0] == 20.0);
  CHECK(b.g[1] == 30.0);
}

TEST_CASE("dot") {
  Tape t;
  CHECK(t.value(t.dot(t.constant({2}, {1, 2}), t.constant({2}, {3, 4}))) == 11.0);
  CHECK_THROWS_AS(t.dot(t.constant({2}, {1, 2}), t.constant({3}, {1, 2, 3})), DimensionError);

  // self-similarity is maximal among equal-norm candidates
  const std::vector<double> v = {0.6, -0.8};
  const std::vector<std::vector<double>> candidates = {{0.6, -0.8}, {-0.8, 0.6}, {0.8, 0.6},
                                                       {-0.6, 0.8}};
  double best = -1e9;
  std::size_t best_i = 99;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = t.value(t.dot(t.constant({2}, v), t.constant({2}, candidates[i])));
    if (s > best) {
      best = s;
      best_i = i;
    }
  }
  CHECK(best_i == 0);
}

TEST_CASE("dot gradient wrt a equals b") {
  Tensor a = Tensor::zeros({3});
  a.v = {1, 2, 3};
  Tape t;
  const Ref loss = t.dot(t.param(a), t.constant({3}, {4, 5, 6}));
  t.backward(loss);
  CHECK(a.g == std::vector<double>{4, 5, 6});
}

TEST_CASE("every primitive matches finite differences at random non-kink points") {
  Rng rng(101);
  int checked = 0;
  for (int it = 0; it < 120; ++it) {
    const int n = 1 + static_cast<int>(rng.integer(6));
    Tensor x = random_tensor({n}, rng);
    Tensor y = random_tensor({n}, rng);
    const int m = 1 + static_cast<int>(rng.integer(4));
    Tensor a = random_tensor({m, n}, rng);
    Tensor pos = random_tensor({n}, rng, 0.1, 3.0);  // for sqrt/recip domains
    const std::vector<double> w = [&] {
      std::vector<double> v(n);
      for (double& e : v) e = rng.uniform(-1.0, 1.0);
      return v;
    }();

    // avoid sampling on a relu kink: nudge anything too close to zero
    for (double& e : x.v) {
      if (std::abs(e) < 1e-3) e += 2e-3;
    }

    const int which = it % 12;
    const int pick = static_cast<int>(rng.integer(2 * static_cast<std::uint64_t>(n)));
    auto build = [&](Tape& t) -> Ref {
      const Ref rx = t.param(x);
      const Ref ry = t.param(y);
      const Ref rw = t.constant({n}, w);
      switch (which) {
        case 0: return t.dot(rw, t.add(rx, ry));
        case 1: return t.dot(rw, t.sub(rx, ry));
        case 2: return t.dot(rw, t.mul(rx, ry));
        case 3: return t.dot(rw, t.tanh(rx));
        case 4: return t.dot(rw, t.sigmoid(rx));
        case 5: return t.dot(rw, t.relu(rx));
        case 6: return t.dot(rw, t.sqrt(t.param(pos)));
        case 7: return t.dot(rw, t.recip(t.param(pos)));
        case 8: return t.dot(t.matmul(t.param(a), rx), t.matmul(t.param(a), ry));
        case 9: return t.dot(rw, t.softmax(rx));
        case 10: return t.index(t.concat(rx, ry), pick);
        case 11: return t.mul(t.sum(t.scale(rx, t.index(ry, 0))), t.dot(rx, ry));
      }
      return t.scalar(0.0);
    };

    std::vector<ad::NamedParam> params = {{"x", &x}, {"y", &y}, {"a", &a}, {"pos", &pos}};
    const auto report = ad::grad_check(params, build, 1e-5, 1e-4);
    CHECK_MESSAGE(report.max_rel_err < 1e-4, "primitive case ", which, " err ",
                  report.max_rel_err);
    checked += static_cast<int>(report.checked);
  }
  CHECK(checked > 1000);
}

TEST_CASE("grad_check quadratic") {
  Tensor w = Tensor::zeros({1});
  w.v = {3.0};
  auto build = [&](Tape& t) {
    const Ref r = t.param(w);
    return t.mul(r, r);
  };
  std::vector<ad::NamedParam> params = {{"w", &w}};
  const auto report = ad::grad_check(params, build, 1e-5, 1e-8);
  CHECK(report.checked == 1);
  CHECK(report.entries[0].analytic == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(report.max_rel_err < 1e-8);
}

TEST_CASE("grad_check flags relu kink at exactly 0") {
  Tensor w = Tensor::zeros({1});
  w.v = {0.0};
  auto build = [&](Tape& t) { return t.relu(t.param(w)); };
  std::vector<ad::NamedParam> params = {{"w", &w}};
  const auto report = ad::grad_check(params, build, 1e-5, 1e-4);
  CHECK(report.flagged == 1);
  CHECK(report.checked == 0);
  CHECK(report.entries[0].kink);
}

TEST_CASE("tape replay determinism") {
  Rng rng(7);
  Tensor a = random_tensor({4}, rng);
  Tensor b = random_tensor({4}, rng);
  Tape t;
  const Ref ra = t.param(a);
  const Ref rb = t.param(b);
  const Ref loss = t.dot(t.tanh(t.mul(ra, rb)), t.softmax(t.add(ra, rb)));

  t.backward(loss);
  const std::vector<double> ga1 = a.g;
  const std::vector<double> gb1 = b.g;

  a.zero_grad();
  b.zero_grad();
  t.backward(loss);
  CHECK(a.g == ga1);  // bit-identical
  CHECK(b.g == gb1);
}

TEST_CASE("gradient accumulates across backward passes without zeroing") {
  Tensor a = Tensor::zeros({2});
  a.v = {1.0, 2.0};
  Tape t;
  const Ref loss = t.sum(t.param(a));
  t.backward(loss);
  t.backward(loss);
  CHECK(a.g == std::vector<double>{2.0, 2.0});
}

TEST_CASE("fan-out accumulates gradient from every consumer") {
  Tensor a = Tensor::zeros({2});
  a.v = {1.0, 3.0};
  Tape t;
  const Ref ra = t.param(a);
  const Ref loss = t.add(t.dot(ra, ra), t.sum(ra));  // d/da = 2a + 1
  t.backward(loss);
  CHECK(a.g[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(a.g[1] == doctest::Approx(7.0).epsilon(1e-15));
}
