#include <doctest.h>

#include "nfr/autodiff.hpp"
#include "nfr/gradcheck.hpp"
#include "nfr/rng.hpp"

using namespace nfr;

namespace {

Mat<double> random_mat(Eigen::Index r, Eigen::Index c, Rng& rng,
                       double scale = 1.0) {
  Mat<double> m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      m(i, j) = scale * rng.normal();
    }
  }
  return m;
}

}  // namespace

TEST_CASE("backward of sum is all ones") {
  Rng rng(11);
  auto x = Tensor<double>::parameter(random_mat(3, 4, rng), "x");
  backward(sum(x));
  CHECK((x.grad().array() == 1.0).all());
}

TEST_CASE("||Wx||^2 has zero gradient at W = 0") {
  Rng rng(12);
  auto w = Tensor<double>::parameter(Mat<double>::Zero(4, 4), "W");
  auto x = Tensor<double>::constant(random_mat(4, 1, rng));
  backward(sum(square(w * x)));
  CHECK(w.grad().norm() == 0.0);
}

TEST_CASE("non-scalar loss is rejected") {
  auto x = Tensor<double>::parameter(Mat<double>::Zero(2, 2), "x");
  CHECK_THROWS_AS(backward(x), UsageError);
}

TEST_CASE("gradient accumulation is additive") {
  Rng rng(13);
  Mat<double> x0 = random_mat(3, 3, rng);
  auto x = Tensor<double>::parameter(x0, "x");
  auto loss_a = sum(square(x));
  auto loss_b = mean(cmul(x, x));

  backward(loss_a);
  backward(loss_b);
  Mat<double> separate = x.grad();

  x.zero_grad();
  backward(loss_a + loss_b);
  Mat<double> joint = x.grad();

  CHECK((separate - joint).norm() < 1e-12 * separate.norm());
}

TEST_CASE("repeated backward without reset accumulates") {
  auto x = Tensor<double>::parameter(Mat<double>::Ones(2, 2), "x");
  auto loss = sum(square(x));
  backward(loss);
  backward(loss);
  CHECK((x.grad().array() == 4.0).all());  // 2 * (2x) at x = 1
}

TEST_CASE("forward passes are deterministic") {
  Rng rng(14);
  Mat<double> a0 = random_mat(5, 3, rng);
  Mat<double> b0 = random_mat(3, 2, rng);
  auto run = [&]() {
    auto a = Tensor<double>::constant(a0);
    auto b = Tensor<double>::constant(b0);
    return Mat<double>(sigmoid(a * b).value());
  };
  Mat<double> first = run();
  Mat<double> second = run();
  CHECK((first - second).norm() == 0.0);
}

TEST_CASE("non-finite values abort with the op named") {
  Mat<double> big = Mat<double>::Constant(1, 1, 1e200);
  auto x = Tensor<double>::constant(big);
  try {
    auto y = scale(cmul(x, x), 1e200);  // overflows to inf
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("cmul") != std::string::npos);
  }
}

TEST_CASE("constant construction rejects NaN") {
  Mat<double> m(1, 1);
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(Tensor<double>::constant(m), NumericalError);
}

TEST_CASE("shape mismatches are configuration errors") {
  auto a = Tensor<double>::parameter(Mat<double>::Zero(2, 3), "a");
  auto b = Tensor<double>::parameter(Mat<double>::Zero(3, 2), "b");
  CHECK_THROWS_AS(a + b, ConfigError);
  CHECK_THROWS_AS(cmul(a, b), ConfigError);
  CHECK_THROWS_AS(b * b, ConfigError);
  CHECK_THROWS_AS(segment(a, 0, 1), ConfigError);
  CHECK_THROWS_AS(reshape(a, 4, 2), ConfigError);
}

TEST_CASE("grad_check sanity: d/dx x^2 = 2x") {
  Mat<double> x0(1, 1);
  x0(0, 0) = 3.0;
  double err = grad_check(
      [](const Tensor<double>& x) { return sum(square(x)); }, x0, 1e-5);
  CHECK(err < 1e-9);
}

TEST_CASE("every op matches central finite differences") {
  Rng rng(15);

  SUBCASE("matmul + add + relu chain") {
    Mat<double> x0 = random_mat(4, 3, rng);
    Mat<double> w = random_mat(3, 5, rng);
    double err = grad_check(
        [&](const Tensor<double>& x) {
          auto wt = Tensor<double>::constant(w);
          return sum(square(relu(x * wt)));
        },
        x0, 1e-6);
    CHECK(err < 1e-6);
  }

  SUBCASE("sigmoid / tanh") {
    Mat<double> x0 = random_mat(3, 3, rng);
    double err = grad_check(
        [](const Tensor<double>& x) {
          return mean(cmul(sigmoid(x), tanh_fn(x)));
        },
        x0, 1e-6);
    CHECK(err < 1e-8);
  }

  SUBCASE("row_standardize") {
    Mat<double> x0 = random_mat(4, 6, rng);
    double err = grad_check(
        [](const Tensor<double>& x) {
          return sum(square(row_standardize(x)));
        },
        x0, 1e-6);
    CHECK(err < 1e-6);
  }

  SUBCASE("segment / reshape / columns") {
    Mat<double> x0 = random_mat(12, 1, rng);
    double err = grad_check(
        [](const Tensor<double>& x) {
          auto m = reshape(segment(x, 2, 8), 2, 4);
          return sum(square(columns(m, 1, 2)));
        },
        x0, 1e-6);
    CHECK(err < 1e-8);
  }

  SUBCASE("broadcast ops") {
    Mat<double> x0 = random_mat(1, 5, rng);
    Mat<double> a = random_mat(4, 5, rng);
    double err = grad_check(
        [&](const Tensor<double>& x) {
          auto at = Tensor<double>::constant(a);
          return sum(square(add_rowvec(mul_rowvec(at, x), x)));
        },
        x0, 1e-6);
    CHECK(err < 1e-6);

    Mat<double> s0 = random_mat(4, 1, rng);
    err = grad_check(
        [&](const Tensor<double>& s) {
          auto at = Tensor<double>::constant(a);
          return mean(square(scale_rows(at, s)));
        },
        s0, 1e-6);
    CHECK(err < 1e-6);
  }

  SUBCASE("min_zero gradient: 2d for d < 0, 0 for d > 0") {
    Mat<double> d0(3, 1);
    d0 << -2.0, 0.5, -0.1;
    auto d = Tensor<double>::parameter(d0, "d");
    backward(sum(square(min_zero(d))));
    CHECK(d.grad()(0, 0) == doctest::Approx(-4.0));
    CHECK(d.grad()(1, 0) == 0.0);
    CHECK(d.grad()(2, 0) == doctest::Approx(-0.2));

    double err = grad_check(
        [](const Tensor<double>& x) { return sum(square(min_zero(x))); },
        d0, 1e-6);
    CHECK(err < 1e-8);
  }
}

TEST_CASE("detach blocks gradient flow") {
  auto x = Tensor<double>::parameter(Mat<double>::Ones(2, 2), "x");
  auto y = sum(square(x.detach()));
  CHECK_FALSE(y.requires_grad());
  backward(sum(square(x)) + y);
  CHECK((x.grad().array() == 2.0).all());
}
