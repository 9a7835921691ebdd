// Shared dense linear algebra, small feed-forward nets with hand-rolled
// reverse-mode gradients, optimizers, and assignment solving.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

namespace lvbench {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// log-domain scalar helpers
// ---------------------------------------------------------------------------

// Stand-in for log(0). Large negative but additively safe: sums of a few
// sentinels with finite terms stay far below any real log-probability.
constexpr double kLogZero = -1e300;

inline bool is_log_zero(double x) { return x < -1e290; }

inline double log_or_zero(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

inline double softplus(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(sigmoid(z)), stable for large |z|
inline double log_sigmoid(double z) { return -softplus(-z); }

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double logaddexp(double a, double b) {
  if (is_log_zero(a)) return b;
  if (is_log_zero(b)) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

template <class Range>
double logsumexp(const Range& xs) {
  double m = kLogZero;
  for (double x : xs) m = std::max(m, x);
  if (is_log_zero(m)) return kLogZero;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline double logsumexp(const Vector& xs) {
  double m = kLogZero;
  for (Eigen::Index i = 0; i < xs.size(); ++i) m = std::max(m, xs(i));
  if (is_log_zero(m)) return kLogZero;
  double s = 0.0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) s += std::exp(xs(i) - m);
  return m + std::log(s);
}

// ---------------------------------------------------------------------------
// Rng — seeded generator with derived streams
//
// Distributions are hand-mapped from raw 64-bit draws so that runs are
// reproducible across standard libraries. stream() derives statistically
// independent generators from (seed, salt), which is what lets parallel and
// serial restart execution produce identical results.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(splitmix64(seed)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t salt) {
    return Rng(splitmix64(seed ^ splitmix64(salt + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next_u64() { return engine(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // [0, n)
  int uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // Fisher-Yates over [0, n)
  std::vector<int> permutation(int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[uniform_int(i + 1)]);
    return idx;
  }

 private:
  bool has_cached_ = false;
  double cached_ = 0.0;
};

inline Matrix random_uniform_matrix(int rows, int cols, double lo, double hi, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline Matrix random_gaussian_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Matrix xavier_uniform(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return random_uniform_matrix(rows, cols, -a, a, rng);
}

// ---------------------------------------------------------------------------
// Small feed-forward networks
//
// A network is a sequence of layers, each either a dense layer with an
// activation tag or a width-preserving residual block
//   y -> relu(V relu(U y + a) + b) + y.
// Gradients are hand-derived reverse passes, not a general autodiff.
// ---------------------------------------------------------------------------

enum class Activation { Identity, Tanh, Relu };

struct DenseLayer {
  Matrix weight;
  Vector bias;
  Activation act = Activation::Identity;
};

struct ResidualBlock {
  Matrix inner;       // U
  Vector inner_bias;  // a
  Matrix outer;       // V
  Vector outer_bias;  // b
};

using MlpLayer = std::variant<DenseLayer, ResidualBlock>;

struct MlpParams {
  std::vector<MlpLayer> layers;

  int input_width() const {
    if (layers.empty()) return 0;
    if (const auto* d = std::get_if<DenseLayer>(&layers.front())) return static_cast<int>(d->weight.cols());
    return static_cast<int>(std::get<ResidualBlock>(layers.front()).inner.cols());
  }

  int output_width() const {
    if (layers.empty()) return 0;
    if (const auto* d = std::get_if<DenseLayer>(&layers.back())) return static_cast<int>(d->weight.rows());
    return static_cast<int>(std::get<ResidualBlock>(layers.back()).inner.cols());
  }
};

// in -> hidden (act) -> out (identity)
inline MlpParams make_mlp2(int in, int hidden, int out, Activation hidden_act, Rng& rng,
                           double init_lo = -0.1, double init_hi = 0.1) {
  MlpParams p;
  p.layers.push_back(DenseLayer{random_uniform_matrix(hidden, in, init_lo, init_hi, rng),
                                random_uniform_matrix(hidden, 1, init_lo, init_hi, rng).col(0),
                                hidden_act});
  p.layers.push_back(DenseLayer{random_uniform_matrix(out, hidden, init_lo, init_hi, rng),
                                random_uniform_matrix(out, 1, init_lo, init_hi, rng).col(0),
                                Activation::Identity});
  return p;
}

// dense-in followed by two residual blocks, all width `dim`
inline MlpParams make_residual_mlp(int dim, Rng& rng) {
  MlpParams p;
  p.layers.push_back(DenseLayer{xavier_uniform(dim, dim, rng), Vector::Zero(dim), Activation::Identity});
  for (int b = 0; b < 2; ++b)
    p.layers.push_back(ResidualBlock{xavier_uniform(dim, dim, rng), Vector::Zero(dim),
                                     xavier_uniform(dim, dim, rng), Vector::Zero(dim)});
  return p;
}

inline Vector apply_activation(Activation act, const Vector& pre) {
  switch (act) {
    case Activation::Identity: return pre;
    case Activation::Tanh: return pre.array().tanh().matrix();
    case Activation::Relu: return pre.cwiseMax(0.0);
  }
  throw std::logic_error("unknown activation");
}

struct MlpCache {
  std::vector<Vector> input;  // per layer: input vector
  std::vector<Vector> mid;    // dense: post-activation output; residual: inner relu
  std::vector<Vector> outer;  // residual: outer relu; dense: unused
};

inline Vector mlp_forward(const MlpParams& params, const Vector& x, MlpCache* cache = nullptr) {
  if (x.size() != params.input_width())
    throw std::invalid_argument("mlp_forward: input width mismatch");
  Vector y = x;
  if (cache) {
    cache->input.clear();
    cache->mid.clear();
    cache->outer.clear();
  }
  for (const auto& layer : params.layers) {
    if (cache) cache->input.push_back(y);
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      if (d->weight.cols() != y.size()) throw std::invalid_argument("mlp_forward: layer width mismatch");
      Vector out = apply_activation(d->act, d->weight * y + d->bias);
      if (cache) {
        cache->mid.push_back(out);
        cache->outer.emplace_back();
      }
      y = std::move(out);
    } else {
      const auto& r = std::get<ResidualBlock>(layer);
      if (r.inner.cols() != y.size()) throw std::invalid_argument("mlp_forward: layer width mismatch");
      Vector inner = (r.inner * y + r.inner_bias).cwiseMax(0.0);
      Vector z = (r.outer * inner + r.outer_bias).cwiseMax(0.0);
      if (cache) {
        cache->mid.push_back(inner);
        cache->outer.push_back(z);
      }
      y = z + y;
    }
  }
  return y;
}

inline MlpParams zeros_like(const MlpParams& params) {
  MlpParams g = params;
  for (auto& layer : g.layers) {
    if (auto* d = std::get_if<DenseLayer>(&layer)) {
      d->weight.setZero();
      d->bias.setZero();
    } else {
      auto& r = std::get<ResidualBlock>(layer);
      r.inner.setZero();
      r.inner_bias.setZero();
      r.outer.setZero();
      r.outer_bias.setZero();
    }
  }
  return g;
}

// Accumulates parameter gradients into `grads` (same shape as params) and
// returns the gradient with respect to the network input.
inline Vector mlp_backward(const MlpParams& params, const MlpCache& cache, Vector dout,
                           MlpParams& grads) {
  for (int li = static_cast<int>(params.layers.size()) - 1; li >= 0; --li) {
    const Vector& x_in = cache.input[li];
    if (const auto* d = std::get_if<DenseLayer>(&params.layers[li])) {
      auto& gd = std::get<DenseLayer>(grads.layers[li]);
      Vector dpre;
      switch (d->act) {
        case Activation::Identity: dpre = dout; break;
        case Activation::Tanh: {
          const Vector& out = cache.mid[li];
          dpre = dout.cwiseProduct((1.0 - out.array().square()).matrix());
          break;
        }
        case Activation::Relu: {
          const Vector& out = cache.mid[li];
          dpre = (out.array() > 0.0).select(dout, 0.0);
          break;
        }
      }
      gd.weight.noalias() += dpre * x_in.transpose();
      gd.bias += dpre;
      dout.noalias() = d->weight.transpose() * dpre;
    } else {
      const auto& r = std::get<ResidualBlock>(params.layers[li]);
      auto& gr = std::get<ResidualBlock>(grads.layers[li]);
      const Vector& inner = cache.mid[li];
      const Vector& z = cache.outer[li];
      Vector dz = (z.array() > 0.0).select(dout, 0.0);
      gr.outer.noalias() += dz * inner.transpose();
      gr.outer_bias += dz;
      Vector dinner = r.outer.transpose() * dz;
      Vector ds = (inner.array() > 0.0).select(dinner, 0.0);
      gr.inner.noalias() += ds * x_in.transpose();
      gr.inner_bias += ds;
      dout.noalias() = r.inner.transpose() * ds + dout;
    }
  }
  return dout;
}

inline int param_count(const MlpParams& params) {
  int n = 0;
  for (const auto& layer : params.layers) {
    if (const auto* d = std::get_if<DenseLayer>(&layer))
      n += static_cast<int>(d->weight.size() + d->bias.size());
    else {
      const auto& r = std::get<ResidualBlock>(layer);
      n += static_cast<int>(r.inner.size() + r.inner_bias.size() + r.outer.size() + r.outer_bias.size());
    }
  }
  return n;
}

namespace detail {
inline void copy_in(const Matrix& m, Vector& out, int& pos) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) out(pos++) = m(i, j);
}
inline void copy_in(const Vector& v, Vector& out, int& pos) {
  for (int i = 0; i < v.size(); ++i) out(pos++) = v(i);
}
inline void copy_out(Matrix& m, const Vector& in, int& pos) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) m(i, j) = in(pos++);
}
inline void copy_out(Vector& v, const Vector& in, int& pos) {
  for (int i = 0; i < v.size(); ++i) v(i) = in(pos++);
}
}  // namespace detail

inline Vector flatten_mlp(const MlpParams& params) {
  Vector out(param_count(params));
  int pos = 0;
  for (const auto& layer : params.layers) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      detail::copy_in(d->weight, out, pos);
      detail::copy_in(d->bias, out, pos);
    } else {
      const auto& r = std::get<ResidualBlock>(layer);
      detail::copy_in(r.inner, out, pos);
      detail::copy_in(r.inner_bias, out, pos);
      detail::copy_in(r.outer, out, pos);
      detail::copy_in(r.outer_bias, out, pos);
    }
  }
  return out;
}

inline void unflatten_mlp(const Vector& flat, MlpParams& params) {
  int pos = 0;
  for (auto& layer : params.layers) {
    if (auto* d = std::get_if<DenseLayer>(&layer)) {
      detail::copy_out(d->weight, flat, pos);
      detail::copy_out(d->bias, flat, pos);
    } else {
      auto& r = std::get<ResidualBlock>(layer);
      detail::copy_out(r.inner, flat, pos);
      detail::copy_out(r.inner_bias, flat, pos);
      detail::copy_out(r.outer, flat, pos);
      detail::copy_out(r.outer_bias, flat, pos);
    }
  }
  if (pos != flat.size()) throw std::invalid_argument("unflatten_mlp: size mismatch");
}

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
inline double grad_check(const std::function<double(const Vector&)>& f, const Vector& x,
                         const Vector& analytic, double eps) {
  if (analytic.size() != x.size()) throw std::invalid_argument("grad_check: size mismatch");
  double worst = 0.0;
  Vector xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double orig = x(i);
    xp(i) = orig + eps;
    const double fp = f(xp);
    xp(i) = orig - eps;
    const double fm = f(xp);
    xp(i) = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("grad_check: non-finite function value");
    const double fd = (fp - fm) / (2.0 * eps);
    const double err = std::abs(analytic(i) - fd) / std::max(1.0, std::abs(analytic(i)));
    worst = std::max(worst, err);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

struct OptimizerState {
  Vector first_moment;
  Vector second_moment;
  long step = 0;
  double step_size;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  OptimizerState(int n, double lr)
      : first_moment(Vector::Zero(n)), second_moment(Vector::Zero(n)), step_size(lr) {}
};

// Bias-corrected Adam descent step. Pass the gradient of the objective being
// minimized.
inline void adam_step(OptimizerState& state, Vector& params, const Vector& grads) {
  if (grads.size() != params.size() || params.size() != state.first_moment.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  if (!grads.allFinite()) throw std::runtime_error("adam_step: non-finite gradient");
  state.step += 1;
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grads;
  state.second_moment =
      state.beta2 * state.second_moment + (1.0 - state.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= state.step_size * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + state.eps);
}

inline void sgd_step(double lr, Vector& params, const Vector& grads) {
  if (!grads.allFinite()) throw std::runtime_error("sgd_step: non-finite gradient");
  params -= lr * grads;
}

// Scales grads in place so the global l2 norm is at most max_norm.
inline void clip_global_norm(Vector& grads, double max_norm) {
  const double norm = grads.norm();
  if (norm > max_norm && norm > 0.0) grads *= max_norm / norm;
}

// ---------------------------------------------------------------------------
// Minimum cost bipartite assignment (Jonker-Volgenant style shortest
// augmenting paths on a dummy-padded square matrix).
// ---------------------------------------------------------------------------

// Returns row -> column assignment covering min(rows, cols) pairs with
// globally minimal total cost; unassigned rows map to -1.
inline std::vector<int> hungarian(const Matrix& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!std::isfinite(cost(i, j)) || cost(i, j) < 0.0)
        throw std::invalid_argument("hungarian: entries must be finite and non-negative");

  // Pad to square; uniform dummy cost keeps the optimum over real pairs intact.
  const int n = std::max(rows, cols);
  const double dummy = 10.0 * std::max(1.0, cost.maxCoeff());
  Matrix a = Matrix::Constant(n, n, dummy);
  a.topLeftCorner(rows, cols) = cost;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[j];
    if (i >= 1 && i <= rows && j <= cols) row_to_col[i - 1] = j - 1;
  }
  return row_to_col;
}

inline double assignment_cost(const Matrix& cost, const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i)
    if (row_to_col[i] >= 0) total += cost(static_cast<int>(i), row_to_col[i]);
  return total;
}

// ---------------------------------------------------------------------------
// Moore-Penrose pseudo-inverse via SVD. Singular values below
// max(dim) * machine-epsilon * sigma_max are treated as zero.
// ---------------------------------------------------------------------------

inline Matrix pseudo_inverse(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Matrix::Zero(a.cols(), a.rows());
  if (!a.allFinite()) throw std::invalid_argument("pseudo_inverse: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon() * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (int i = 0; i < s.size(); ++i) inv(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace lvbench
