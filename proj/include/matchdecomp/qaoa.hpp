#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "matchdecomp/optimize.hpp"
#include "matchdecomp/qubo.hpp"

namespace matchdecomp {

inline constexpr int default_qubit_cap = 26;

inline std::size_t statevector_bytes(int num_qubits) {
  return sizeof(std::complex<double>) << num_qubits;
}

inline double wrap_two_pi(double x) {
  const double tau = 2.0 * std::numbers::pi;
  double r = std::fmod(x, tau);
  if (r < 0.0) r += tau;
  return r;
}

inline double wrap_pi(double x) {
  double r = std::fmod(x, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  return r;
}

namespace detail {

inline void check_qubit_cap(int num_vars, int qubit_cap, const char* who) {
  const int hard_cap = 30;  // 2^30 amplitudes = 16 GiB; refuse beyond regardless
  const int cap = std::min(qubit_cap, hard_cap);
  if (num_vars > cap)
    throw std::invalid_argument(
        std::string(who) + ": " + std::to_string(num_vars) +
        " edge variables exceed the statevector qubit cap (" + std::to_string(cap) +
        "); exact statevector simulation only supports smaller instances");
}

// Deterministic block partition: results never depend on thread scheduling
// because blocks are fixed and the work is element-wise.
template <typename Fn>
void parallel_blocks(std::size_t total, Fn&& fn) {
  constexpr std::size_t kBlocks = 8;
  const unsigned hw = std::thread::hardware_concurrency();
  if (total < (std::size_t{1} << 18) || hw <= 1) {
    fn(std::size_t{0}, total, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t b = next.fetch_add(1);
      if (b >= kBlocks) return;
      fn(total * b / kBlocks, total * (b + 1) / kBlocks, b);
    }
  };
  std::vector<std::thread> pool;
  const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(hw, kBlocks));
  pool.reserve(nthreads);
  for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline std::vector<std::uint64_t> adjacency_masks(const QuboModel& model) {
  std::vector<std::uint64_t> mask(static_cast<std::size_t>(model.num_vars), 0);
  for (int j = 0; j < model.num_vars; ++j)
    for (int k : model.adjacency[static_cast<std::size_t>(j)])
      mask[static_cast<std::size_t>(j)] |= std::uint64_t{1} << k;
  return mask;
}

// C(x) via bit tricks; each unordered violating pair is counted once per
// endpoint, matching the ordered double sum of the model.
inline double mask_cost(const QuboModel& model, const std::vector<std::uint64_t>& mask,
                        std::uint64_t x) {
  double c = 0.0;
  std::uint64_t rest = x;
  while (rest) {
    const int j = std::countr_zero(rest);
    rest &= rest - 1;
    c -= model.weights[static_cast<std::size_t>(j)];
    c += model.lambda * static_cast<double>(std::popcount(mask[static_cast<std::size_t>(j)] & x));
  }
  return c;
}

inline double ipow(double base, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace detail

// One-layer variational state over edge qubits: bit j of the basis index is
// edge j of the model's indexing.
struct QaoaState {
  int num_qubits = 0;
  double gamma = 0.0;
  double beta = 0.0;
  std::vector<std::complex<double>> amplitudes;

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }
};

// Uniform superposition, diagonal phase e^{-i gamma c(x)}, then the mixer as
// in-place single-qubit rotations [[cos b, -i sin b], [-i sin b, cos b]].
inline QaoaState simulate(const QuboModel& model, double gamma, double beta,
                          int qubit_cap = default_qubit_cap) {
  detail::check_qubit_cap(model.num_vars, qubit_cap, "simulate");
  const int n = model.num_vars;
  const std::size_t size = std::size_t{1} << n;
  QaoaState st;
  st.num_qubits = n;
  st.gamma = gamma;
  st.beta = beta;
  st.amplitudes.resize(size);

  const std::vector<std::uint64_t> mask = detail::adjacency_masks(model);
  const double norm = std::pow(2.0, -0.5 * n);
  auto* amp = st.amplitudes.data();

  detail::parallel_blocks(size, [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t x = lo; x < hi; ++x) {
      const double c = detail::mask_cost(model, mask, x);
      amp[x] = std::complex<double>(norm * std::cos(gamma * c), -norm * std::sin(gamma * c));
    }
  });

  const double cb = std::cos(beta);
  const double sb = std::sin(beta);
  for (int j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    const std::size_t lowmask = bit - 1;
    detail::parallel_blocks(size / 2, [&](std::size_t lo, std::size_t hi, std::size_t) {
      for (std::size_t t = lo; t < hi; ++t) {
        const std::size_t i0 = ((t & ~lowmask) << 1) | (t & lowmask);
        const std::size_t i1 = i0 | bit;
        const std::complex<double> a0 = amp[i0];
        const std::complex<double> a1 = amp[i1];
        amp[i0] = std::complex<double>(cb * a0.real() + sb * a1.imag(),
                                       cb * a0.imag() - sb * a1.real());
        amp[i1] = std::complex<double>(cb * a1.real() + sb * a0.imag(),
                                       cb * a1.imag() - sb * a0.real());
      }
    });
  }
  return st;
}

// c(x) for every basis state; c(0..0) = 0.
inline std::vector<double> cost_spectrum(const QuboModel& model, int qubit_cap = default_qubit_cap) {
  detail::check_qubit_cap(model.num_vars, qubit_cap, "cost_spectrum");
  const std::size_t size = std::size_t{1} << model.num_vars;
  const std::vector<std::uint64_t> mask = detail::adjacency_masks(model);
  std::vector<double> c(size);
  for (std::size_t x = 0; x < size; ++x) c[x] = detail::mask_cost(model, mask, x);
  return c;
}

// <psi(gamma,beta)| H_C |psi(gamma,beta)> = sum_x |psi(x)|^2 c(x), evaluated
// in closed form for the one-layer ansatz over the Ising rewrite
//   C = c0 + sum_j h_j Z_j + (lambda/2) sum_{unordered adjacent} Z_j Z_k,
// h_j = w_j/2 - (lambda/2) deg_j. Single-qubit and two-qubit terms follow the
// standard depth-1 expectation formulas; all couplings equal lambda/2, so the
// neighbourhood products collapse to integer powers of cos(gamma*lambda).
inline double expectation(const QuboModel& model, double gamma, double beta,
                          int qubit_cap = default_qubit_cap) {
  detail::check_qubit_cap(model.num_vars, qubit_cap, "expectation");
  const int n = model.num_vars;
  const double lam = model.lambda;

  std::vector<int> deg(static_cast<std::size_t>(n));
  double pair_count2 = 0.0;
  for (int j = 0; j < n; ++j) {
    deg[static_cast<std::size_t>(j)] = static_cast<int>(model.adjacency[static_cast<std::size_t>(j)].size());
    pair_count2 += static_cast<double>(deg[static_cast<std::size_t>(j)]);
  }
  double wsum = 0.0;
  for (double w : model.weights) wsum += w;
  const double c0 = -0.5 * wsum + 0.5 * lam * (pair_count2 / 2.0);

  std::vector<double> h(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    h[static_cast<std::size_t>(j)] =
        0.5 * model.weights[static_cast<std::size_t>(j)] - 0.5 * lam * deg[static_cast<std::size_t>(j)];

  const double s2b = std::sin(2.0 * beta);
  const double s4b = std::sin(4.0 * beta);
  const double cgl = std::cos(gamma * lam);
  const double c2gl = std::cos(2.0 * gamma * lam);

  double e = c0;
  for (int j = 0; j < n; ++j)
    e += h[static_cast<std::size_t>(j)] * s2b * std::sin(2.0 * gamma * h[static_cast<std::size_t>(j)]) *
         detail::ipow(cgl, deg[static_cast<std::size_t>(j)]);

  for (int i = 0; i < n; ++i) {
    const auto& gi = model.adjacency[static_cast<std::size_t>(i)];
    for (int j : gi) {
      if (j <= i) continue;  // each unordered pair once; coupling lambda/2
      const auto& gj = model.adjacency[static_cast<std::size_t>(j)];
      int shared = 0;
      {
        auto a = gi.begin();
        auto b = gj.begin();
        while (a != gi.end() && b != gj.end()) {
          if (*a < *b) ++a;
          else if (*b < *a) ++b;
          else { ++shared; ++a; ++b; }
        }
      }
      const int di = deg[static_cast<std::size_t>(i)];
      const int dj = deg[static_cast<std::size_t>(j)];
      const int singles = (di - 1 - shared) + (dj - 1 - shared);
      const double hi = h[static_cast<std::size_t>(i)], hj = h[static_cast<std::size_t>(j)];
      const double term1 =
          0.5 * s4b * std::sin(gamma * lam) *
          (std::cos(2.0 * gamma * hi) * detail::ipow(cgl, di - 1) +
           std::cos(2.0 * gamma * hj) * detail::ipow(cgl, dj - 1));
      const double term2 =
          -0.5 * s2b * s2b *
          (std::cos(2.0 * gamma * (hi + hj)) * detail::ipow(c2gl, shared) * detail::ipow(cgl, singles) -
           std::cos(2.0 * gamma * (hi - hj)) * detail::ipow(cgl, singles));
      e += 0.5 * lam * (term1 + term2);
    }
  }
  return e;
}

struct QaoaOptimizerConfig {
  bool enabled = true;           // false: fixed-parameter mode
  double start_gamma = 0.5;      // wrapped into the box before use
  double start_beta = -0.5;
  TrustRegionConfig trust;
  double fixed_gamma = wrap_two_pi(-0.5);
  double fixed_beta = 0.5;
};

struct QaoaOptimizeResult {
  double gamma = 0.0;
  double beta = 0.0;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<TrustRegionEval> trace;
};

// Derivative-free search for (gamma*, beta*) in [0,2pi] x [0,pi]; in fixed
// mode the configured parameters are returned untouched.
inline QaoaOptimizeResult optimize_params(const QuboModel& model, const QaoaOptimizerConfig& cfg = {},
                                          int qubit_cap = default_qubit_cap) {
  QaoaOptimizeResult out;
  if (!cfg.enabled) {
    out.gamma = cfg.fixed_gamma;
    out.beta = cfg.fixed_beta;
    return out;
  }
  detail::check_qubit_cap(model.num_vars, qubit_cap, "optimize_params");
  const double tau = 2.0 * std::numbers::pi;
  auto objective = [&](double g, double b) { return expectation(model, g, b, qubit_cap); };
  TrustRegionResult r = minimize_linear_trust_region(
      objective, {wrap_two_pi(cfg.start_gamma), wrap_pi(cfg.start_beta)}, {0.0, 0.0},
      {tau, std::numbers::pi}, cfg.trust);
  out.gamma = r.x0;
  out.beta = r.x1;
  out.value = r.value;
  out.trace = std::move(r.trace);
  return out;
}

// `shots` draws from |psi(x)|^2 by inverse CDF: sorted uniforms against one
// sequential pass over the probability vector. Deterministic given the rng.
inline std::vector<Bitstring> sample(const QuboModel& model, double gamma, double beta, int shots,
                                     std::mt19937_64& rng, int qubit_cap = default_qubit_cap) {
  if (shots <= 0) throw std::invalid_argument("sample: shots must be positive");
  detail::check_qubit_cap(model.num_vars, qubit_cap, "sample");
  const QaoaState st = simulate(model, gamma, beta, qubit_cap);
  const std::size_t size = st.amplitudes.size();

  double partial[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  detail::parallel_blocks(size, [&](std::size_t lo, std::size_t hi, std::size_t b) {
    double s = 0.0;
    for (std::size_t x = lo; x < hi; ++x) s += std::norm(st.amplitudes[x]);
    partial[b] += s;
  });
  double total = 0.0;
  for (double p : partial) total += p;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> points(static_cast<std::size_t>(shots));
  for (auto& p : points) p = unif(rng) * total;
  std::sort(points.begin(), points.end());

  std::vector<Bitstring> out;
  out.reserve(static_cast<std::size_t>(shots));
  auto emit = [&](std::uint64_t x) {
    Bitstring bits(static_cast<std::size_t>(st.num_qubits));
    for (int j = 0; j < st.num_qubits; ++j) bits[static_cast<std::size_t>(j)] = (x >> j) & 1u;
    out.push_back(std::move(bits));
  };

  double cum = 0.0;
  std::size_t next = 0;
  std::uint64_t last_support = 0;
  for (std::size_t x = 0; x < size && next < points.size(); ++x) {
    const double p = std::norm(st.amplitudes[x]);
    if (p > 0.0) last_support = x;
    cum += p;
    while (next < points.size() && points[next] < cum) {
      emit(x);
      ++next;
    }
  }
  for (; next < points.size(); ++next) emit(last_support);  // float residue
  return out;
}

// (bitstring, probability) lines for debugging; small instances only.
inline void dump_probabilities(const QaoaState& st, std::ostream& out) {
  if (st.num_qubits > 16)
    throw std::invalid_argument("dump_probabilities: limited to 16 qubits");
  char buf[40];
  for (std::size_t x = 0; x < st.amplitudes.size(); ++x) {
    std::string bits(static_cast<std::size_t>(st.num_qubits), '0');
    for (int j = 0; j < st.num_qubits; ++j)
      if ((x >> j) & 1u) bits[static_cast<std::size_t>(j)] = '1';
    std::snprintf(buf, sizeof buf, "%.17g", std::norm(st.amplitudes[x]));
    out << bits << ' ' << buf << '\n';
  }
}

}  // namespace matchdecomp
