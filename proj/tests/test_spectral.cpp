#include <doctest.h>

#include <cmath>
#include <random>

#include "qderiv/simulator.hpp"
#include "qderiv/spectral.hpp"

using namespace qderiv;

TEST_CASE("prony recovers a synthesized two-tone signal") {
  const std::vector<Tone> truth = {{-0.3, complexd(0.5, 0)},
                                   {0.3, complexd(0.5, 0)}};
  const PhaseSignal sig = synthesize(truth, 9);
  const SpectralEstimate est = prony(sig, 2);
  REQUIRE(est.tones.size() == 2);
  CHECK(est.tones[0].omega == doctest::Approx(-0.3).epsilon(1e-8));
  CHECK(est.tones[1].omega == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(std::abs(est.tones[0].amp - complexd(0.5, 0)) < 1e-8);
  CHECK(std::abs(est.tones[1].amp - complexd(0.5, 0)) < 1e-8);
}

TEST_CASE("prony on a constant signal") {
  PhaseSignal sig;
  sig.g.assign(8, complexd(0.25, -0.1));
  const SpectralEstimate est = prony(sig, 1);
  REQUIRE(est.tones.size() == 1);
  CHECK(est.tones[0].omega == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(std::abs(est.tones[0].amp - complexd(0.25, -0.1)) < 1e-10);
}

TEST_CASE("prony identifiability bound") {
  const PhaseSignal sig = synthesize({{0.2, 1.0}}, 9);  // k_max = 9
  CHECK_THROWS_AS(prony(sig, 6), std::invalid_argument);  // 6 > (9+1)/2
  CHECK_NOTHROW(prony(sig, 5, {1e-3, 1e-6, true}));
}

TEST_CASE("prony flags a degenerate signal unless rank reduction is on") {
  PhaseSignal sig;
  sig.g.assign(10, complexd(1.0, 0.0));  // single tone, rank 1
  CHECK_THROWS_AS(prony(sig, 3), std::runtime_error);
  PronyOptions opts;
  opts.allow_rank_reduction = true;
  const SpectralEstimate est = prony(sig, 3, opts);
  REQUIRE(est.tones.size() == 1);
  CHECK(est.tones[0].omega == doctest::Approx(0.0));
}

TEST_CASE("prony round trip on random well-separated tones") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uamp(0.05, 1.0);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 200; ++trial) {
    const int k_max = 9 + int(rng() % 30);
    const int max_tones = (k_max + 1) / 2;
    const int n = 1 + int(rng() % std::min(4, max_tones));
    // well separated frequencies (>= 0.1 rad apart)
    std::vector<double> omegas;
    while ((int)omegas.size() < n) {
      const double w = -3.0 + 6.0 * double(rng() % 10000) / 10000.0;
      bool ok = true;
      for (double o : omegas)
        if (std::abs(o - w) < 0.1) ok = false;
      if (ok) omegas.push_back(w);
    }
    std::vector<Tone> truth;
    for (double w : omegas)
      truth.push_back({w, std::polar(uamp(rng), uph(rng))});
    const PhaseSignal sig = synthesize(truth, k_max);
    PronyOptions opts;
    opts.amp_threshold = 1e-6;
    opts.allow_rank_reduction = true;
    const SpectralEstimate est = prony(sig, n, opts);
    REQUIRE(est.tones.size() == truth.size());
    std::sort(truth.begin(), truth.end(),
              [](const Tone& a, const Tone& b) { return a.omega < b.omega; });
    for (std::size_t i = 0; i < truth.size(); ++i) {
      CHECK(est.tones[i].omega ==
            doctest::Approx(truth[i].omega).epsilon(1e-8));
      CHECK(std::abs(est.tones[i].amp - truth[i].amp) < 1e-8);
    }
  }
}

TEST_CASE("amplitude conservation for unitary-generated signals") {
  // |g(k)| <= 1 signals keep sum |alpha| <= 1 + tolerance
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    // amplitudes from a normalized state: sum |a_j|^2 = 1
    const int n = 3;
    Eigen::VectorXd p = Eigen::VectorXd::Random(n).cwiseAbs();
    p /= p.sum();
    std::vector<Tone> truth;
    for (int j = 0; j < n; ++j)
      truth.push_back({-1.0 + 0.8 * j, complexd(p(j), 0)});
    const SpectralEstimate est = prony(synthesize(truth, 11), n);
    double total = 0;
    for (const auto& t : est.tones) total += std::abs(t.amp);
    CHECK(total <= 1.0 + 1e-6);
  }
}

TEST_CASE("lsq_phase on clean and conjugated tones") {
  const PhaseSignal sig = synthesize({{0.1, complexd(0.8, 0)}}, 20);
  CHECK(lsq_phase(sig) == doctest::Approx(0.1).epsilon(1e-12));

  PhaseSignal conj = sig;
  for (auto& v : conj.g) v = std::conj(v);
  CHECK(lsq_phase(conj) == doctest::Approx(-0.1).epsilon(1e-12));

  PhaseSignal zero;
  zero.g.assign(5, complexd(0, 0));
  CHECK_THROWS_AS(lsq_phase(zero), std::invalid_argument);
}

TEST_CASE("lsq_phase agrees with prony on a single tone") {
  const PhaseSignal sig = synthesize({{0.7345, complexd(0.6, 0.2)}}, 24);
  const SpectralEstimate est = prony(sig, 1);
  REQUIRE(est.tones.size() == 1);
  CHECK(std::abs(lsq_phase(sig) - est.tones[0].omega) < 1e-10);
}

TEST_CASE("noisy lsq_phase error shrinks with k_max") {
  auto phase_rmse = [](int k_max) {
    double acc = 0;
    const int reps = 200;
    for (int s = 0; s < reps; ++s) {
      PhaseSignal noisy;
      noisy.g.resize(k_max + 1);
      for (int k = 0; k <= k_max; ++k) {
        const complexd truth = 0.9 * std::polar(1.0, 0.4 * k);
        noisy.g[k] =
            mt_tomography(truth, {512, mix_seed(11, k_max * 1000 + s, k)})
                .estimate;
      }
      const double err = lsq_phase(noisy) - 0.4;
      acc += err * err;
    }
    return std::sqrt(acc / reps);
  };
  const double e16 = phase_rmse(16);
  const double e128 = phase_rmse(128);
  CHECK(e128 < 0.5 * e16);
}

TEST_CASE("lsq_amplitude exact on noiseless tones") {
  const PhaseSignal sig = synthesize({{0.2, complexd(0.5, 0)}}, 30);
  AmplitudeFitConfig cfg;
  cfg.window = 10;
  CHECK(std::abs(lsq_amplitude(sig, 0.2, cfg) - complexd(0.5, 0)) < 1e-12);

  const PhaseSignal zero = synthesize({{0.2, complexd(0, 0)}}, 30);
  CHECK(std::abs(lsq_amplitude(zero, 0.2, cfg)) < 1e-15);

  AmplitudeFitConfig bad;
  bad.window = 31;
  CHECK_THROWS_AS(lsq_amplitude(sig, 0.2, bad), std::invalid_argument);
}

TEST_CASE("sampled amplitude variance is consistent with the model") {
  // Var[A~] ~ L^2/(k_max^2 N) + 1/(L N), checked within a factor of 3.
  const int k_max = 128;
  const long N = 2048;
  const double A = 0.5, phi = 0.2;
  const int L = (int)std::lround(std::pow(double(k_max), 2.0 / 3.0));
  std::vector<complexd> ests;
  for (int s = 0; s < 300; ++s) {
    PhaseSignal noisy;
    noisy.g.resize(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
      const complexd truth = A * std::polar(1.0, phi * k);
      noisy.g[k] = mt_tomography(truth, {N, mix_seed(99, s, k)}).estimate;
    }
    AmplitudeFitConfig cfg;
    cfg.window = L;
    ests.push_back(lsq_amplitude(noisy, lsq_phase(noisy), cfg));
  }
  complexd mean(0, 0);
  for (auto e : ests) mean += e;
  mean /= double(ests.size());
  double var = 0;
  for (auto e : ests) var += std::norm(e - mean);
  var /= double(ests.size() - 1);
  const double model =
      double(L) * L / (double(k_max) * k_max * N) + 1.0 / (double(L) * N);
  CHECK(var / model > 1.0 / 3.0);
  CHECK(var / model < 3.0);
}

TEST_CASE("variance scaling experiment input validation") {
  VarianceScalingConfig cfg;
  cfg.k_max_values = {32, 64};
  CHECK_THROWS_AS(variance_scaling_experiment(cfg, SweepVariable::KMax),
                  std::invalid_argument);
  cfg.k_max_values = {32, 64, 128, 256};
  cfg.seeds = 10;
  CHECK_THROWS_AS(variance_scaling_experiment(cfg, SweepVariable::KMax),
                  std::invalid_argument);
}

TEST_CASE("variance scaling: L = k_max keeps the variance roughly flat") {
  VarianceScalingConfig cfg;
  cfg.k_max_values = {32, 64, 128, 256};
  cfg.shots = 2048;
  cfg.seeds = 120;
  cfg.window_rule = VarianceScalingConfig::WindowRule::Full;
  const ScalingResult res =
      variance_scaling_experiment(cfg, SweepVariable::KMax);
  // the L^2/k_max^2 term dominates and is constant in k_max
  CHECK(std::abs(res.exponent) < 0.25);
}
