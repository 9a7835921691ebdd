#include <catch2/catch_amalgamated.hpp>

#include <lvbench/numerics.hpp>

#include "oracles.hpp"

using namespace lvbench;

TEST_CASE("mlp_forward: zero tanh net outputs zeros") {
  MlpParams p;
  p.layers.push_back(DenseLayer{Matrix::Zero(4, 3), Vector::Zero(4), Activation::Tanh});
  p.layers.push_back(DenseLayer{Matrix::Zero(2, 4), Vector::Zero(2), Activation::Identity});
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  Vector y = mlp_forward(p, x);
  REQUIRE(y.size() == 2);
  REQUIRE(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mlp_forward: residual block with zero inner weights is identity") {
  MlpParams p;
  p.layers.push_back(ResidualBlock{Matrix::Zero(5, 5), Vector::Zero(5), Matrix::Zero(5, 5), Vector::Zero(5)});
  Rng rng(7);
  Vector x(5);
  for (int i = 0; i < 5; ++i) x(i) = rng.uniform(-2.0, 2.0);
  Vector y = mlp_forward(p, x);
  REQUIRE((y - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mlp_forward: random 3->5->2 net matches straight-line re-evaluation") {
  Rng rng(11);
  MlpParams p = make_mlp2(3, 5, 2, Activation::Tanh, rng, -0.7, 0.7);
  Vector x(3);
  x << 0.3, -1.1, 2.0;
  Vector y = mlp_forward(p, x);

  // independent straight-line oracle
  const auto& l0 = std::get<DenseLayer>(p.layers[0]);
  const auto& l1 = std::get<DenseLayer>(p.layers[1]);
  Vector h(5);
  for (int i = 0; i < 5; ++i) {
    double s = l0.bias(i);
    for (int j = 0; j < 3; ++j) s += l0.weight(i, j) * x(j);
    h(i) = std::tanh(s);
  }
  Vector expect(2);
  for (int i = 0; i < 2; ++i) {
    double s = l1.bias(i);
    for (int j = 0; j < 5; ++j) s += l1.weight(i, j) * h(j);
    expect(i) = s;
  }
  REQUIRE((y - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mlp_forward: dimension mismatch rejected") {
  Rng rng(3);
  MlpParams p = make_mlp2(3, 5, 2, Activation::Tanh, rng);
  Vector x = Vector::Zero(4);
  REQUIRE_THROWS_AS(mlp_forward(p, x), std::invalid_argument);
}

TEST_CASE("grad_check: quadratic") {
  auto f = [](const Vector& v) { return v(0) * v(0); };
  Vector x(1), g(1);
  x << 3.0;
  g << 6.0;
  REQUIRE(grad_check(f, x, g, 1e-5) < 1e-8);
  Vector corrupted = 2.0 * g;
  const double err = grad_check(f, x, corrupted, 1e-5);
  REQUIRE(err > 0.45);
  REQUIRE(err < 0.55);
}

TEST_CASE("grad_check: mlp loss gradients pass finite differences") {
  Rng rng(23);
  MlpParams p = make_mlp2(4, 6, 3, Activation::Tanh, rng, -0.5, 0.5);
  // add a residual block between the two dense layers for coverage
  MlpParams deep;
  deep.layers.push_back(std::get<DenseLayer>(p.layers[0]));
  deep.layers.push_back(ResidualBlock{random_uniform_matrix(6, 6, -0.4, 0.4, rng), Vector::Zero(6),
                                      random_uniform_matrix(6, 6, -0.4, 0.4, rng), Vector::Zero(6)});
  deep.layers.push_back(std::get<DenseLayer>(p.layers[1]));

  Vector x(4);
  x << 0.2, -0.4, 1.3, 0.9;
  auto loss_at = [&](const Vector& flat) {
    MlpParams q = deep;
    unflatten_mlp(flat, q);
    Vector y = mlp_forward(q, x);
    return 0.5 * y.squaredNorm();
  };

  MlpCache cache;
  Vector y = mlp_forward(deep, x, &cache);
  MlpParams grads = zeros_like(deep);
  mlp_backward(deep, cache, y, grads);

  const double err = grad_check(loss_at, flatten_mlp(deep), flatten_mlp(grads), 1e-5);
  REQUIRE(err < 1e-4);
}

TEST_CASE("adam_step: zero gradient leaves fresh parameters unchanged") {
  Vector params(3);
  params << 1.0, -2.0, 0.5;
  const Vector before = params;
  OptimizerState st(3, 0.01);
  adam_step(st, params, Vector::Zero(3));
  REQUIRE((params - before).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(st.step == 1);
}

TEST_CASE("adam_step: single step from fresh state matches the bias-corrected closed form") {
  Vector params(2), grads(2);
  params << 0.7, -0.3;
  grads << 0.25, -4.0;
  OptimizerState st(2, 0.01);
  adam_step(st, params, grads);
  for (int i = 0; i < 2; ++i) {
    const double mhat = grads(i);  // (1-b1)g / (1-b1)
    const double vhat = grads(i) * grads(i);
    const double expect = (i == 0 ? 0.7 : -0.3) - 0.01 * mhat / (std::sqrt(vhat) + 1e-8);
    REQUIRE(params(i) == Catch::Approx(expect).margin(1e-15));
  }
}

TEST_CASE("adam_step: deterministic given identical state and gradients") {
  Rng rng(5);
  Vector g(8);
  for (int i = 0; i < 8; ++i) g(i) = rng.normal();
  Vector p1 = Vector::Ones(8), p2 = Vector::Ones(8);
  OptimizerState s1(8, 0.003), s2(8, 0.003);
  for (int t = 0; t < 50; ++t) {
    adam_step(s1, p1, g * std::cos(t));
    adam_step(s2, p2, g * std::cos(t));
  }
  for (int i = 0; i < 8; ++i) REQUIRE(p1(i) == p2(i));
}

TEST_CASE("adam_step: NaN gradient aborts with diagnostic") {
  Vector params = Vector::Zero(2);
  Vector g(2);
  g << 1.0, std::numeric_limits<double>::quiet_NaN();
  OptimizerState st(2, 0.01);
  REQUIRE_THROWS_AS(adam_step(st, params, g), std::runtime_error);
}

TEST_CASE("hungarian: 2x2 example") {
  Matrix cost(2, 2);
  cost << 1.0, 2.0, 2.0, 1.0;
  auto assign = hungarian(cost);
  REQUIRE(assign == std::vector<int>{0, 1});
  REQUIRE(assignment_cost(cost, assign) == Catch::Approx(2.0));
}

TEST_CASE("hungarian: zero diagonal picks identity") {
  Matrix cost = Matrix::Constant(4, 4, 50.0);
  cost.diagonal().setZero();
  auto assign = hungarian(cost);
  for (int i = 0; i < 4; ++i) REQUIRE(assign[i] == i);
}

TEST_CASE("hungarian: empty matrix gives empty assignment") {
  REQUIRE(hungarian(Matrix(0, 0)).empty());
}

TEST_CASE("hungarian: matches factorial brute force on random instances up to 7x7") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + rng.uniform_int(7);
    const int cols = 1 + rng.uniform_int(7);
    Matrix cost(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) cost(i, j) = rng.uniform(0.0, 10.0);
    auto assign = hungarian(cost);
    int pairs = 0;
    for (int c : assign)
      if (c >= 0) ++pairs;
    REQUIRE(pairs == std::min(rows, cols));
    const double total = assignment_cost(cost, assign);
    const double expect = oracles::brute_force_assignment(cost);
    REQUIRE(total == Catch::Approx(expect).margin(1e-9));
  }
}

TEST_CASE("hungarian: 1000 random 6x6 instances equal brute force") {
  Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix cost(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) cost(i, j) = rng.uniform(0.0, 1.0);
    const double total = assignment_cost(cost, hungarian(cost));
    REQUIRE(total == Catch::Approx(oracles::brute_force_assignment(cost)).margin(1e-9));
  }
}

TEST_CASE("pseudo_inverse: identity") {
  Matrix i5 = Matrix::Identity(5, 5);
  REQUIRE((pseudo_inverse(i5) - i5).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pseudo_inverse: orthonormal columns invert by transpose") {
  Rng rng(9);
  Matrix a = random_gaussian_matrix(6, 3, rng);
  // Gram-Schmidt
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < c; ++k) a.col(c) -= a.col(k).dot(a.col(c)) * a.col(k);
    a.col(c).normalize();
  }
  REQUIRE((pseudo_inverse(a) - a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pseudo_inverse: left inverse of full-column-rank matrix") {
  Rng rng(13);
  Matrix a = random_gaussian_matrix(8, 4, rng);
  Matrix pinv = pseudo_inverse(a);
  REQUIRE((pinv * a - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pseudo_inverse: Moore-Penrose identities on random inputs") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 2 + rng.uniform_int(6);
    const int c = 2 + rng.uniform_int(6);
    Matrix a = random_gaussian_matrix(r, c, rng);
    Matrix p = pseudo_inverse(a);
    REQUIRE((a * p * a - a).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE((p * a * p - p).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(((a * p).transpose() - a * p).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(((p * a).transpose() - p * a).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("rng: derived streams are reproducible and distinct") {
  Rng a = Rng::stream(42, 1);
  Rng b = Rng::stream(42, 1);
  Rng c = Rng::stream(42, 2);
  REQUIRE(a.next_u64() == b.next_u64());
  REQUIRE(a.next_u64() != c.next_u64());
}

TEST_CASE("logsumexp: basics and log-zero handling") {
  std::vector<double> xs{std::log(0.25), std::log(0.5), std::log(0.25)};
  REQUIRE(logsumexp(xs) == Catch::Approx(0.0).margin(1e-12));
  std::vector<double> zeros{kLogZero, kLogZero};
  REQUIRE(is_log_zero(logsumexp(zeros)));
  REQUIRE(logaddexp(kLogZero, std::log(0.5)) == Catch::Approx(std::log(0.5)));
}
