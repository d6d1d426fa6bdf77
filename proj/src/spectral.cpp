#include "qderiv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qderiv/simulator.hpp"

namespace qderiv {

namespace {

// Roots of z^n + c[n-1] z^{n-1} + ... + c[0] via the companion matrix.
std::vector<complexd> poly_roots(const Eigen::VectorXcd& c) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c(i);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
  std::vector<complexd> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = solver.eigenvalues()(i);
  return roots;
}

}  // namespace

PhaseSignal synthesize(const std::vector<Tone>& tones, int k_max, double t) {
  PhaseSignal sig;
  sig.t = t;
  sig.g.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    complexd v(0, 0);
    for (const auto& tone : tones)
      v += tone.amp * std::polar(1.0, tone.omega * k);
    sig.g[k] = v;
  }
  return sig;
}

SpectralEstimate prony(const PhaseSignal& sig, int n_tones,
                       const PronyOptions& opts) {
  const int K = sig.k_max();
  if (K < 1) throw std::invalid_argument("prony: signal too short");
  if (n_tones < 1) throw std::invalid_argument("prony: n_tones must be >= 1");
  if (n_tones > (K + 1) / 2)
    throw std::invalid_argument(
        "prony: tone count exceeds identifiability bound (k_max+1)/2");

  // Linear prediction: g(k+n) = -sum_m c_m g(k+m), k = 0..K-n.
  const int rows = K + 1 - n_tones;
  Eigen::MatrixXcd A(rows, n_tones);
  Eigen::VectorXcd b(rows);
  for (int k = 0; k < rows; ++k) {
    for (int m = 0; m < n_tones; ++m) A(k, m) = sig.g[k + m];
    b(k) = -sig.g[k + n_tones];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > opts.rank_rel_tol * smax && sv(i) > 1e-300) ++rank;
  if (rank < n_tones) {
    if (!opts.allow_rank_reduction || rank == 0)
      throw std::runtime_error(
          "prony: singular prediction system (degenerate signal)");
    return prony(sig, rank, opts);
  }
  const Eigen::VectorXcd c = svd.solve(b);

  // Tone frequencies from the prediction-polynomial roots.
  std::vector<complexd> roots = poly_roots(c);

  // Merge near-coincident roots (degenerate-energy tie-break).
  std::sort(roots.begin(), roots.end(),
            [](complexd a, complexd b) { return std::arg(a) < std::arg(b); });
  std::vector<complexd> kept;
  for (const auto& z : roots) {
    if (!kept.empty() &&
        std::abs(std::arg(z) - std::arg(kept.back())) < opts.merge_tol)
      continue;
    kept.push_back(z);
  }

  // Amplitudes from Vandermonde least squares over the full signal.
  const int m = static_cast<int>(kept.size());
  Eigen::MatrixXcd V(K + 1, m);
  for (int k = 0; k <= K; ++k)
    for (int j = 0; j < m; ++j)
      V(k, j) = std::pow(kept[j], k);
  Eigen::VectorXcd gvec(K + 1);
  for (int k = 0; k <= K; ++k) gvec(k) = sig.g[k];
  Eigen::VectorXcd alpha =
      V.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(gvec);

  SpectralEstimate out;
  for (int j = 0; j < m; ++j) {
    if (std::abs(alpha(j)) < opts.amp_threshold) continue;
    out.tones.push_back(Tone{std::arg(kept[j]), alpha(j)});
  }
  std::sort(out.tones.begin(), out.tones.end(),
            [](const Tone& a, const Tone& b) { return a.omega < b.omega; });
  return out;
}

double lsq_phase(const PhaseSignal& sig) {
  const int K = sig.k_max();
  if (K < 1) throw std::invalid_argument("lsq_phase: signal too short");
  complexd num(0, 0);
  double den = 0;
  for (int k = 0; k < K; ++k) {
    num += std::conj(sig.g[k]) * sig.g[k + 1];
    den += std::norm(sig.g[k]);
  }
  if (den <= 0) throw std::invalid_argument("lsq_phase: zero signal");
  return std::arg(num);
}

complexd lsq_amplitude(const PhaseSignal& sig, double phi,
                       const AmplitudeFitConfig& cfg) {
  const int K = sig.k_max();
  int L = cfg.window;
  if (L == 0) L = std::max(1, (int)std::lround(std::pow(double(K), 2.0 / 3.0)));
  if (L < 1 || L > K)
    throw std::invalid_argument("lsq_amplitude: window outside signal");
  complexd acc(0, 0);
  for (int k = 1; k <= L; ++k)
    acc += std::polar(1.0, -phi * k) * sig.g[k];
  return acc / double(L);
}

ScalingResult variance_scaling_experiment(const VarianceScalingConfig& cfg,
                                          SweepVariable sweep) {
  const auto n_points = sweep == SweepVariable::KMax
                            ? cfg.k_max_values.size()
                            : cfg.shot_values.size();
  if (n_points < 4)
    throw std::invalid_argument(
        "variance_scaling_experiment: need at least 4 sweep points");
  if (cfg.seeds < 100)
    throw std::invalid_argument(
        "variance_scaling_experiment: need at least 100 seeds");

  ScalingResult res;
  for (std::size_t i = 0; i < n_points; ++i) {
    const int k_max = sweep == SweepVariable::KMax ? cfg.k_max_values[i]
                                                   : cfg.k_max;
    const long shots = sweep == SweepVariable::KMax ? cfg.shots
                                                    : cfg.shot_values[i];
    const int L =
        cfg.window_rule == VarianceScalingConfig::WindowRule::Full
            ? k_max
            : std::max(1, (int)std::lround(std::pow(double(k_max), 2.0 / 3.0)));

    std::vector<complexd> estimates;
    estimates.reserve(cfg.seeds);
    for (int s = 0; s < cfg.seeds; ++s) {
      PhaseSignal noisy;
      noisy.g.resize(k_max + 1);
      for (int k = 0; k <= k_max; ++k) {
        const complexd truth =
            cfg.tone_amp * std::polar(1.0, cfg.tone_phase * k);
        ShotConfig sc{shots, mix_seed(cfg.base_seed,
                                      0x9000u + i * 1000003u + s, k)};
        noisy.g[k] = mt_tomography(truth, sc).estimate;
      }
      const double phi = lsq_phase(noisy);
      AmplitudeFitConfig fc;
      fc.window = L;
      estimates.push_back(lsq_amplitude(noisy, phi, fc));
    }
    complexd mean(0, 0);
    for (auto e : estimates) mean += e;
    mean /= double(estimates.size());
    double var = 0;
    for (auto e : estimates) var += std::norm(e - mean);
    var /= double(estimates.size() - 1);

    res.xs.push_back(sweep == SweepVariable::KMax ? double(k_max)
                                                  : double(shots));
    res.variances.push_back(var);
  }

  // log-log least squares slope with a ~95% half-width from residuals.
  const int n = static_cast<int>(res.xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(res.xs[i]);
    const double y = std::log(res.variances[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  res.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - res.exponent * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(res.xs[i]);
    const double r = std::log(res.variances[i]) - (intercept + res.exponent * x);
    ss += r * r;
  }
  const double se =
      std::sqrt(ss / std::max(1, n - 2) / (sxx - sx * sx / n));
  res.ci_halfwidth = 2.0 * se;
  return res;
}

}  // namespace qderiv
