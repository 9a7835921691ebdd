// Noisy-OR generative model: parameters, sampling, exact and importance-
// sampled marginal likelihood, synthetic dataset generators, and the
// plants-table ingestion used for the semi-synthetic PLNT ground truth.
#pragma once

#include <lvbench/numerics.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace lvbench {

// ---------------------------------------------------------------------------
// Parameters. Failure probabilities exp(-W_ji) are derived from the stored
// non-negative weight matrix W (n x m); priors pi and per-observation noise l
// live in [0, 1].
// ---------------------------------------------------------------------------

struct NoisyOrParams {
  Vector priors;   // pi, length m
  Matrix weights;  // W, n x m, entries >= 0
  Vector noise;    // l, length n

  int latent_count() const { return static_cast<int>(priors.size()); }
  int observed_count() const { return static_cast<int>(noise.size()); }

  Matrix failures() const { return (-weights).array().exp().matrix(); }
  Vector failure_column(int i) const { return (-weights.col(i)).array().exp().matrix(); }

  static NoisyOrParams from_failures(const Vector& priors, const Matrix& failures,
                                     const Vector& noise) {
    NoisyOrParams p;
    p.priors = priors;
    p.weights = -failures.array().log().matrix();
    p.noise = noise;
    p.validate();
    return p;
  }

  void validate() const {
    if (weights.rows() != noise.size() || weights.cols() != priors.size())
      throw std::invalid_argument("NoisyOrParams: inconsistent dimensions");
    if (priors.minCoeff() < 0.0 || priors.maxCoeff() > 1.0)
      throw std::invalid_argument("NoisyOrParams: priors outside [0,1]");
    if (noise.minCoeff() < 0.0 || noise.maxCoeff() > 1.0)
      throw std::invalid_argument("NoisyOrParams: noise outside [0,1]");
    if (weights.minCoeff() < 0.0) throw std::invalid_argument("NoisyOrParams: negative weight");
    if (!weights.allFinite()) throw std::invalid_argument("NoisyOrParams: non-finite weight");
  }
};

inline nlohmann::json noisy_or_to_json(const NoisyOrParams& p) {
  nlohmann::json j;
  j["m"] = p.latent_count();
  j["n"] = p.observed_count();
  j["priors"] = std::vector<double>(p.priors.data(), p.priors.data() + p.priors.size());
  Matrix f = p.failures();
  std::vector<std::vector<double>> rows(f.rows());
  for (int r = 0; r < f.rows(); ++r) {
    rows[r].resize(f.cols());
    for (int c = 0; c < f.cols(); ++c) rows[r][c] = f(r, c);
  }
  j["failures"] = rows;
  j["noise"] = std::vector<double>(p.noise.data(), p.noise.data() + p.noise.size());
  return j;
}

inline NoisyOrParams noisy_or_from_json(const nlohmann::json& j) {
  const int m = j.at("m").get<int>();
  const int n = j.at("n").get<int>();
  Vector priors(m), noise(n);
  Matrix failures(n, m);
  const auto& pv = j.at("priors");
  const auto& nv = j.at("noise");
  const auto& fv = j.at("failures");
  if (static_cast<int>(pv.size()) != m || static_cast<int>(nv.size()) != n ||
      static_cast<int>(fv.size()) != n)
    throw std::invalid_argument("noisy_or_from_json: shape mismatch");
  for (int i = 0; i < m; ++i) priors(i) = pv[i].get<double>();
  for (int r = 0; r < n; ++r) {
    noise(r) = nv[r].get<double>();
    for (int c = 0; c < m; ++c) failures(r, c) = fv[r][c].get<double>();
  }
  return NoisyOrParams::from_failures(priors, failures, noise);
}

inline void save_noisy_or(const NoisyOrParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_noisy_or: cannot open " + path);
  out << noisy_or_to_json(p).dump(2) << "\n";
}

inline NoisyOrParams load_noisy_or(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_noisy_or: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return noisy_or_from_json(j);
}

// ---------------------------------------------------------------------------
// Joint and marginal log-probabilities
// ---------------------------------------------------------------------------

// Caches log pi, log(1-pi), log(1-l) so repeated joint evaluations against one
// model stay cheap.
struct LogJointEvaluator {
  const NoisyOrParams* params;
  Vector log_pi, log_1mpi, log_1ml;

  explicit LogJointEvaluator(const NoisyOrParams& p) : params(&p) {
    const int m = p.latent_count(), n = p.observed_count();
    log_pi.resize(m);
    log_1mpi.resize(m);
    log_1ml.resize(n);
    for (int i = 0; i < m; ++i) {
      log_pi(i) = log_or_zero(p.priors(i));
      log_1mpi(i) = log_or_zero(1.0 - p.priors(i));
    }
    for (int j = 0; j < n; ++j) log_1ml(j) = log_or_zero(1.0 - p.noise(j));
  }

  double log_prior(const Vector& h) const {
    double s = 0.0;
    for (int i = 0; i < h.size(); ++i) s += h(i) > 0.5 ? log_pi(i) : log_1mpi(i);
    return s;
  }

  // log p(x | h) given the accumulated active weight s_j = sum_i W_ji h_i
  double log_likelihood(const Vector& x, const Vector& active_weight) const {
    double acc = 0.0;
    for (int j = 0; j < x.size(); ++j) {
      const double log_p0 = log_1ml(j) - active_weight(j);
      if (x(j) < 0.5) {
        acc += log_p0;
      } else {
        // log(1 - exp(log_p0)), safe because log_p0 <= 0
        if (is_log_zero(log_p0)) continue;  // p0 = 0, so p(x_j=1) = 1
        const double p0 = std::exp(log_p0);
        acc += p0 < 1.0 ? std::log1p(-p0) : kLogZero;
      }
      if (is_log_zero(acc)) return kLogZero;
    }
    return acc;
  }

  double operator()(const Vector& x, const Vector& h) const {
    const double lp = log_prior(h);
    if (is_log_zero(lp)) return kLogZero;
    const double ll = log_likelihood(x, params->weights * h);
    if (is_log_zero(ll)) return kLogZero;
    return lp + ll;
  }
};

// log p(x, h). A log-zero sentinel (is_log_zero) flags outcomes with
// probability exactly zero.
inline double log_joint(const NoisyOrParams& p, const Vector& x, const Vector& h) {
  if (x.size() != p.observed_count() || h.size() != p.latent_count())
    throw std::invalid_argument("log_joint: dimension mismatch");
  return LogJointEvaluator(p)(x, h);
}

// Exact log p(x) by enumeration over latent configurations (Gray-code
// incremental updates). Refuses m > 16; use is_log_marginal beyond that.
inline double exact_log_marginal(const NoisyOrParams& p, const Vector& x) {
  const int m = p.latent_count();
  if (x.size() != p.observed_count())
    throw std::invalid_argument("exact_log_marginal: dimension mismatch");
  if (m > 16)
    throw std::invalid_argument(
        "exact_log_marginal: latent count > 16; use is_log_marginal instead");
  LogJointEvaluator ev(p);

  // Latents with prior exactly 0 or 1 are pinned; only the rest are enumerated.
  std::vector<int> free_idx;
  Vector base_s = Vector::Zero(p.observed_count());
  for (int i = 0; i < m; ++i) {
    if (p.priors(i) <= 0.0) continue;
    if (p.priors(i) >= 1.0) {
      base_s += p.weights.col(i);
      continue;
    }
    free_idx.push_back(i);
  }
  const int f = static_cast<int>(free_idx.size());

  Vector s = base_s;
  double log_prior = 0.0;
  for (int i = 0; i < f; ++i) log_prior += ev.log_1mpi(free_idx[i]);

  double acc = kLogZero;
  const std::uint64_t states = 1ULL << f;
  std::uint64_t gray = 0;
  for (std::uint64_t g = 0;; ++g) {
    const double term = log_prior + ev.log_likelihood(x, s);
    acc = logaddexp(acc, term);
    if (g + 1 >= states) break;
    const std::uint64_t next_gray = (g + 1) ^ ((g + 1) >> 1);
    const int bit = std::countr_zero(gray ^ next_gray);
    const int idx = free_idx[bit];
    if (next_gray & (1ULL << bit)) {
      s += p.weights.col(idx);
      log_prior += ev.log_pi(idx) - ev.log_1mpi(idx);
    } else {
      s -= p.weights.col(idx);
      log_prior += ev.log_1mpi(idx) - ev.log_pi(idx);
    }
    gray = next_gray;
  }
  return acc;
}

// Importance-sampled estimate log(1/K sum_k p(x,h_k)/q(h_k|x)) with h_k drawn
// from the proposal. Lower bound of log p(x) in expectation, non-decreasing in
// K. The proposal must provide sample_posterior(x, rng) -> (h, log q(h|x)).
template <class Proposal>
double is_log_marginal(const NoisyOrParams& p, const Proposal& q, const Vector& x, int K,
                       Rng& rng, int* resample_count = nullptr) {
  if (K < 1) throw std::invalid_argument("is_log_marginal: K >= 1 required");
  LogJointEvaluator ev(p);
  double acc = kLogZero;
  int resamples = 0;
  for (int k = 0; k < K; ++k) {
    for (int attempt = 0;; ++attempt) {
      auto [h, log_q] = q.sample_posterior(x, rng);
      if (!is_log_zero(log_q)) {
        acc = logaddexp(acc, ev(x, h) - log_q);
        break;
      }
      ++resamples;
      if (attempt > 1000)
        throw std::runtime_error("is_log_marginal: proposal keeps producing zero-mass draws");
    }
  }
  if (resample_count) *resample_count = resamples;
  return acc - std::log(static_cast<double>(K));
}

// One draw from the generative process.
inline std::pair<Vector, Vector> sample(const NoisyOrParams& p, Rng& rng) {
  const int m = p.latent_count(), n = p.observed_count();
  Vector h(m), x(n);
  for (int i = 0; i < m; ++i) h(i) = rng.bernoulli(p.priors(i)) ? 1.0 : 0.0;
  const Vector s = p.weights * h;
  for (int j = 0; j < n; ++j) {
    const double p0 = (1.0 - p.noise(j)) * std::exp(-s(j));
    x(j) = rng.bernoulli(1.0 - p0) ? 1.0 : 0.0;
  }
  return {std::move(h), std::move(x)};
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct BinaryDataset {
  Matrix train;       // rows are samples
  Matrix validation;
  Matrix test;
  std::uint64_t seed = 0;
  nlohmann::json descriptor;

  int observed_count() const { return static_cast<int>(train.cols()); }

  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&h](const Matrix& m) {
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
          h ^= m(r, c) > 0.5 ? 0x9eULL : 0x31ULL;
          h *= 1099511628211ULL;
        }
    };
    mix(train);
    mix(validation);
    mix(test);
    return h;
  }
};

struct DatasetSpec {
  std::string variant;  // IMG | PLNT | UNIF | CON8 | CON24 | IMG-FLIP | IMG-UNIF
  std::uint64_t seed = 0;
  int total_samples = 11000;
  int train_samples = 9000;
  int validation_samples = 1000;
  // optional overrides; negative / NaN means "variant default"
  int override_m = -1;
  int override_n = -1;
  double override_prior = -1.0;
  double override_noise = -1.0;
  std::string plnt_model_path;  // ground-truth model file for the PLNT variant
};

struct GeneratedDataset {
  NoisyOrParams truth;      // model recovery is measured against this
  NoisyOrParams generator;  // model the samples were drawn from
  BinaryDataset data;
};

// The eight 8x8 connection masks of the image-structured ground truth model.
// At least five shapes have no anchor pixel (a pixel covered by exactly one
// shape), and all pairs of failure columns are farther than 4.0 in l1.
inline const std::array<std::array<const char*, 8>, 8>& img_masks() {
  static const std::array<std::array<const char*, 8>, 8> masks = {{
      // horizontal bar
      {"........", "........", "........", "########", "########", "........", "........",
       "........"},
      // vertical bar
      {"...##...", "...##...", "...##...", "...##...", "...##...", "...##...", "...##...",
       "...##..."},
      // cross
      {"...##...", "...##...", "...##...", "########", "########", "...##...", "...##...",
       "...##..."},
      // border frame
      {"########", "#......#", "#......#", "#......#", "#......#", "#......#", "#......#",
       "########"},
      // diamond ring
      {"...##...", "..#..#..", ".#....#.", "#......#", "#......#", ".#....#.", "..#..#..",
       "...##..."},
      // top-left corner block
      {"###.....", "###.....", "###.....", "........", "........", "........", "........",
       "........"},
      // bottom-right corner block
      {"........", "........", "........", "........", "........", ".....###", ".....###",
       ".....###"},
      // interior checker block
      {"........", ".#.#.#.#", "#.#.#.#.", ".#.#.#.#", "#.#.#.#.", ".#.#.#.#", "#.#.#.#.",
       "........"},
  }};
  return masks;
}

namespace detail {

inline Matrix img_weight_matrix(double on_failure) {
  const double w_on = -std::log(on_failure);
  Matrix w = Matrix::Zero(64, 8);
  const auto& masks = img_masks();
  for (int i = 0; i < 8; ++i)
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        if (masks[i][r][c] == '#') w(8 * r + c, i) = w_on;
  return w;
}

inline NoisyOrParams img_model(double prior, double noise) {
  NoisyOrParams p;
  p.priors = Vector::Constant(8, prior);
  p.weights = img_weight_matrix(0.1);
  p.noise = Vector::Constant(64, noise);
  return p;
}

// one UNIF-style latent column: connected with probability 0.25, failure
// probability U[0.05, 0.2] when connected
inline Vector unif_weight_column(int n, Rng& rng) {
  Vector col = Vector::Zero(n);
  for (int j = 0; j < n; ++j)
    if (rng.bernoulli(0.25)) col(j) = -std::log(rng.uniform(0.05, 0.2));
  return col;
}

inline NoisyOrParams unif_model(int m, int n, double noise, Rng& rng) {
  NoisyOrParams p;
  p.priors.resize(m);
  p.weights.resize(n, m);
  for (int i = 0; i < m; ++i) {
    p.priors(i) = rng.uniform(0.1, 0.3);
    p.weights.col(i) = unif_weight_column(n, rng);
  }
  p.noise = Vector::Constant(n, noise);
  return p;
}

inline NoisyOrParams con_model(int m, int n, int degree, double noise, Rng& rng) {
  NoisyOrParams p;
  p.priors = Vector::Constant(m, 1.0 / static_cast<double>(degree));
  p.weights = Matrix::Zero(n, m);
  const double w_on = -std::log(0.1);
  for (int i = 0; i < m; ++i) {
    auto perm = rng.permutation(n);
    for (int k = 0; k < degree; ++k) p.weights(perm[k], i) = w_on;
  }
  p.noise = Vector::Constant(n, noise);
  return p;
}

inline Matrix draw_samples(const NoisyOrParams& p, int count, Rng& rng) {
  Matrix out(count, p.observed_count());
  for (int r = 0; r < count; ++r) out.row(r) = sample(p, rng).second.transpose();
  return out;
}

}  // namespace detail

// Ground truth and samples are pure functions of (variant, seed): the model is
// drawn from one derived stream and the samples from another, so the ground
// truth is generated exactly once per spec/seed and re-used.
inline GeneratedDataset generate_dataset(const DatasetSpec& spec) {
  Rng model_rng = Rng::stream(spec.seed, 0xA11CE);
  Rng data_rng = Rng::stream(spec.seed, 0xDA7A);

  const double noise = spec.override_noise >= 0.0 ? spec.override_noise : 0.001;
  const int total = spec.total_samples;
  if (spec.train_samples + spec.validation_samples > total)
    throw std::invalid_argument("generate_dataset: partition exceeds total");

  NoisyOrParams truth, generator;
  bool flip_postprocess = false;

  if (spec.variant == "IMG") {
    const double prior = spec.override_prior >= 0.0 ? spec.override_prior : 0.25;
    truth = detail::img_model(prior, noise);
    generator = truth;
  } else if (spec.variant == "UNIF") {
    const int m = spec.override_m > 0 ? spec.override_m : 8;
    const int n = spec.override_n > 0 ? spec.override_n : 64;
    truth = detail::unif_model(m, n, noise, model_rng);
    generator = truth;
  } else if (spec.variant == "CON8" || spec.variant == "CON24") {
    const int degree = spec.variant == "CON8" ? 8 : 24;
    const int m = spec.override_m > 0 ? spec.override_m : 8;
    const int n = spec.override_n > 0 ? spec.override_n : 64;
    truth = detail::con_model(m, n, degree, noise, model_rng);
    generator = truth;
  } else if (spec.variant == "IMG-FLIP") {
    truth = detail::img_model(0.25, noise);
    generator = truth;
    flip_postprocess = true;
  } else if (spec.variant == "IMG-UNIF") {
    truth = detail::img_model(0.25, noise);
    generator = truth;
    generator.priors.conservativeResize(16);
    generator.weights.conservativeResize(64, 16);
    for (int i = 8; i < 16; ++i) {
      generator.priors(i) = 0.05;
      generator.weights.col(i) = detail::unif_weight_column(64, model_rng);
    }
  } else if (spec.variant == "PLNT") {
    if (spec.plnt_model_path.empty())
      throw std::invalid_argument(
          "generate_dataset: PLNT requires plnt_model_path (a model produced by "
          "build_plnt_model)");
    truth = load_noisy_or(spec.plnt_model_path);
    generator = truth;
  } else {
    throw std::invalid_argument("generate_dataset: unknown variant " + spec.variant);
  }

  Matrix samples = detail::draw_samples(generator, total, data_rng);
  if (flip_postprocess) {
    for (int r = 0; r < samples.rows(); ++r)
      if (data_rng.bernoulli(0.10))
        for (int j = 0; j < samples.cols(); j += 4) samples(r, j) = 1.0 - samples(r, j);
  }

  GeneratedDataset out;
  out.truth = std::move(truth);
  out.generator = std::move(generator);
  out.data.seed = spec.seed;
  out.data.train = samples.topRows(spec.train_samples);
  out.data.validation = samples.middleRows(spec.train_samples, spec.validation_samples);
  out.data.test = samples.bottomRows(total - spec.train_samples - spec.validation_samples);
  out.data.descriptor = {{"variant", spec.variant},
                         {"seed", spec.seed},
                         {"m", out.generator.latent_count()},
                         {"n", out.generator.observed_count()},
                         {"truth_m", out.truth.latent_count()},
                         {"total", total}};
  out.data.descriptor["hash"] = out.data.content_hash();
  return out;
}

// ---------------------------------------------------------------------------
// Dataset files: one sample per line of space-separated 0/1 tokens, plus a
// companion JSON header carrying the generator descriptor.
// ---------------------------------------------------------------------------

inline void save_dataset(const BinaryDataset& data, const std::string& prefix) {
  auto write_split = [](const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) {
        if (c) out << ' ';
        out << (m(r, c) > 0.5 ? '1' : '0');
      }
      out << '\n';
    }
  };
  write_split(data.train, prefix + ".train.txt");
  write_split(data.validation, prefix + ".valid.txt");
  write_split(data.test, prefix + ".test.txt");
  nlohmann::json header = data.descriptor;
  header["seed"] = data.seed;
  header["splits"] = {{"train", data.train.rows()},
                      {"validation", data.validation.rows()},
                      {"test", data.test.rows()}};
  std::ofstream out(prefix + ".json");
  if (!out) throw std::runtime_error("save_dataset: cannot open " + prefix + ".json");
  out << header.dump(2) << "\n";
}

inline Matrix load_binary_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_binary_rows: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      if (tok != "0" && tok != "1")
        throw std::runtime_error("load_binary_rows: non-binary token '" + tok + "' in " + path);
      row.push_back(tok == "1" ? 1.0 : 0.0);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("load_binary_rows: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  return m;
}

inline BinaryDataset load_dataset(const std::string& prefix) {
  BinaryDataset data;
  data.train = load_binary_rows(prefix + ".train.txt");
  data.validation = load_binary_rows(prefix + ".valid.txt");
  data.test = load_binary_rows(prefix + ".test.txt");
  std::ifstream in(prefix + ".json");
  if (in) {
    in >> data.descriptor;
    data.seed = data.descriptor.value("seed", 0ULL);
  }
  return data;
}

// ---------------------------------------------------------------------------
// UCI plants table
// ---------------------------------------------------------------------------

// The 70 territory codes of the plants table: US states plus DC, Puerto Rico
// and the Virgin Islands; Canadian provinces and territories (Labrador listed
// separately from Newfoundland); Greenland (gl, dengl) and St. Pierre et
// Miquelon (fraspm).
inline const std::vector<std::string>& plants_territories() {
  static const std::vector<std::string> codes = {
      "ab", "ak", "al", "ar", "az", "bc", "ca", "co", "ct", "dc", "de", "dengl", "fl", "fraspm",
      "ga", "gl", "hi", "ia", "id", "il", "in", "ks", "ky", "la", "lb", "ma", "mb", "md", "me",
      "mi", "mn", "mo", "ms", "mt", "nb", "nc", "nd", "ne", "nf", "nh", "nj", "nm", "ns", "nt",
      "nu", "nv", "ny", "oh", "ok", "on", "or", "pa", "pe", "pr", "qc", "ri", "sc", "sd", "sk",
      "tn", "tx", "ut", "va", "vi", "vt", "wa", "wi", "wv", "wy", "yt"};
  return codes;
}

// Parses the comma-separated plants table (plant name, then territory codes)
// into one-hot binary rows over the fixed territory list.
inline Matrix load_plants_rows(const std::string& path,
                               const std::vector<std::string>& territories = plants_territories()) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_plants: cannot open " + path);
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < territories.size(); ++i)
    index[territories[i]] = static_cast<int>(i);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row(territories.size(), 0.0);
    std::stringstream ss(line);
    std::string field;
    bool first = true;
    while (std::getline(ss, field, ',')) {
      if (first) {  // plant name
        first = false;
        continue;
      }
      // trim
      std::size_t b = field.find_first_not_of(" \t");
      std::size_t e = field.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      std::string code = field.substr(b, e - b + 1);
      for (auto& ch : code) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      auto it = index.find(code);
      if (it == index.end())
        throw std::runtime_error("load_plants: unknown territory code '" + code + "' at line " +
                                 std::to_string(line_no));
      row[it->second] = 1.0;
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(territories.size()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  return m;
}

// All rows land in the train split; the trainer hook re-partitions as needed.
inline BinaryDataset load_plants(const std::string& path,
                                 const std::vector<std::string>& territories = plants_territories()) {
  BinaryDataset data;
  data.train = load_plants_rows(path, territories);
  data.validation = Matrix(0, data.train.cols());
  data.test = Matrix(0, data.train.cols());
  data.descriptor = {{"variant", "plants-table"}, {"rows", data.train.rows()}, {"path", path}};
  return data;
}

// ---------------------------------------------------------------------------
// PLNT ground-truth construction: train a 20-latent model on the plants rows,
// drop latents with prior below 0.01, round failure probabilities above 0.50
// up to 1.00, and keep the learned noise probabilities.
// ---------------------------------------------------------------------------

using NoisyOrTrainerHook =
    std::function<NoisyOrParams(const BinaryDataset&, int latent_count, std::uint64_t seed)>;

inline NoisyOrParams build_plnt_model(const BinaryDataset& plants, const NoisyOrTrainerHook& trainer,
                                      std::uint64_t seed = 0, int latent_count = 20) {
  Matrix all_rows(plants.train.rows() + plants.validation.rows() + plants.test.rows(),
                  plants.train.cols());
  all_rows << plants.train, plants.validation, plants.test;
  if (all_rows.rows() < 10) throw std::invalid_argument("build_plnt_model: too few rows");
  BinaryDataset data;
  const int total = static_cast<int>(all_rows.rows());
  const int val = std::max(1, total / 10);
  data.train = all_rows.topRows(total - val);
  data.validation = all_rows.bottomRows(val);
  data.test = data.validation;
  data.seed = seed;
  data.descriptor = {{"variant", "PLNT-source"}, {"rows", total}};

  NoisyOrParams learned = trainer(data, latent_count, seed);

  std::vector<int> kept;
  for (int i = 0; i < learned.latent_count(); ++i)
    if (learned.priors(i) >= 0.01) kept.push_back(i);
  if (kept.size() < 2) throw std::runtime_error("build_plnt_model: degenerate fit (<2 latents)");

  NoisyOrParams out;
  out.priors.resize(static_cast<int>(kept.size()));
  out.weights.resize(learned.observed_count(), static_cast<int>(kept.size()));
  out.noise = learned.noise;
  const double w_round = -std::log(0.50);  // failures above 0.50 become exactly 1.00
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.priors(static_cast<int>(k)) = learned.priors(kept[k]);
    Vector col = learned.weights.col(kept[k]);
    for (int j = 0; j < col.size(); ++j)
      if (col(j) < w_round) col(j) = 0.0;
    out.weights.col(static_cast<int>(k)) = col;
  }
  return out;
}

}  // namespace lvbench
