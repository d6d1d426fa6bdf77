#include "qderiv/ppe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qderiv {

namespace {

double effective_t(const PPEConfig& cfg, const EigenDecomposition& eig) {
  const double norm = eig.spectral_norm();
  const double t = cfg.t > 0.0 ? cfg.t : M_PI / (2.0 * std::max(norm, 1e-300));
  if (t * norm >= M_PI)
    throw std::invalid_argument("ppe: t * spectral_norm must stay below pi");
  if (cfg.bin_width <= 0.0)
    throw std::invalid_argument("ppe: bin width must be positive");
  return t;
}

// Matrix of a unit-weight Pauli word in the eigenbasis.
Eigen::MatrixXcd eigenbasis_matrix(const EigenDecomposition& eig,
                                   const PauliTerm& p) {
  if (std::abs(p.coeff - complexd(1.0, 0.0)) > 1e-12)
    throw std::invalid_argument(
        "ppe: excitation operators must be unit-weight Pauli words");
  const int dim = eig.dim();
  Eigen::MatrixXcd cols(dim, dim);
  for (int j = 0; j < dim; ++j)
    cols.col(j) = apply_word(p.word, Eigen::VectorXcd(eig.states.col(j)));
  return eig.states.adjoint() * cols;
}

complexd sample_point(complexd truth, const PPEConfig& cfg, std::uint64_t k0,
                      std::uint64_t k1, std::uint64_t tag) {
  if (cfg.shots <= 0) return truth;
  // tiny numerical excursions outside the unit disk are clamped
  const double mag = std::abs(truth);
  if (mag > 1.0) truth /= (mag + 1e-15);
  ShotConfig sc{cfg.shots, mix_seed(cfg.seed ^ tag, k0, k1)};
  return mt_tomography(truth, sc).estimate;
}

}  // namespace

PhaseSignal2D ppe_signal(const EigenDecomposition& eig,
                         const PreparedState& prep, const PauliTerm& P,
                         const PauliTerm& Q, const PPEConfig& cfg) {
  const double t = effective_t(cfg, eig);
  const int dim = eig.dim();
  const Eigen::MatrixXcd Pm = eigenbasis_matrix(eig, P);
  const Eigen::MatrixXcd Qm = eigenbasis_matrix(eig, Q);
  const Eigen::VectorXcd& a = prep.amplitudes;

  PhaseSignal2D out;
  out.t = t;
  out.g.resize(cfg.k0_max + 1, cfg.k1_max + 1);
  for (int k1 = 0; k1 <= cfg.k1_max; ++k1) {
    Eigen::VectorXcd u(dim);
    for (int j = 0; j < dim; ++j)
      u(j) = std::polar(1.0, k1 * t * eig.energies(j));
    const Eigen::MatrixXcd M = Pm * u.asDiagonal() * Qm;
    for (int k0 = 0; k0 <= cfg.k0_max; ++k0) {
      Eigen::VectorXcd w(dim), z(dim);
      for (int m = 0; m < dim; ++m) {
        const complexd ph = std::polar(1.0, k0 * t * eig.energies(m));
        w(m) = std::conj(a(m)) * ph;
        z(m) = a(m) * ph;
      }
      const complexd truth = w.transpose() * M * z;
      out.g(k0, k1) = sample_point(truth, cfg, k0, k1, 0x2d);
    }
  }
  return out;
}

VqeSignal ppe_signal_vqe(const EigenDecomposition& eig,
                         const PreparedState& prep, const PauliTerm& P,
                         const PauliTerm& Q, const PPEConfig& cfg) {
  const double t = effective_t(cfg, eig);
  const int dim = eig.dim();
  const Eigen::MatrixXcd Pm = eigenbasis_matrix(eig, P);
  const Eigen::MatrixXcd Qm = eigenbasis_matrix(eig, Q);
  const Eigen::VectorXcd& a = prep.amplitudes;
  // alpha_j = <ref|P|j><j|Q|ref> in the eigenbasis
  const Eigen::VectorXcd left = Pm.adjoint() * a;   // <ref|P|j> = conj(left_j)
  const Eigen::VectorXcd right = Qm * a;            // <j|Q|ref>

  VqeSignal out;
  out.sig.t = t;
  out.sig.g.resize(cfg.k1_max + 1);
  double psum = 0.0;
  for (int k = 0; k <= cfg.k1_max; ++k) {
    complexd truth(0, 0);
    for (int j = 0; j < dim; ++j)
      truth += std::conj(left(j)) * right(j) *
               std::polar(1.0, k * t * eig.energies(j));
    psum += 0.5 * (1.0 + std::norm(truth));
    out.sig.g[k] = sample_point(truth, cfg, k, 0, 0x7e);
  }
  out.mean_postselect_probability = psum / double(cfg.k1_max + 1);
  double power = 0.0;
  for (int j = 0; j < dim; ++j)
    power += std::norm(std::conj(left(j)) * right(j));
  out.tone_power = power;
  return out;
}

PhaseSignal3D ppe_signal_d3(const EigenDecomposition& eig,
                            const PreparedState& prep, const PauliTerm& P1,
                            const PauliTerm& P2, const PauliTerm& P3,
                            const PPEConfig& cfg) {
  const double t = effective_t(cfg, eig);
  const int dim = eig.dim();
  const Eigen::MatrixXcd M1 = eigenbasis_matrix(eig, P1);
  const Eigen::MatrixXcd M2 = eigenbasis_matrix(eig, P2);
  const Eigen::MatrixXcd M3 = eigenbasis_matrix(eig, P3);
  const Eigen::VectorXcd& a = prep.amplitudes;

  PhaseSignal3D out;
  out.t = t;
  out.g.assign(cfg.k2_max + 1,
               Eigen::MatrixXcd::Zero(cfg.k0_max + 1, cfg.k1_max + 1));
  for (int k2 = 0; k2 <= cfg.k2_max; ++k2) {
    Eigen::VectorXcd u2(dim);
    for (int j = 0; j < dim; ++j)
      u2(j) = std::polar(1.0, k2 * t * eig.energies(j));
    for (int k1 = 0; k1 <= cfg.k1_max; ++k1) {
      Eigen::VectorXcd u1(dim);
      for (int j = 0; j < dim; ++j)
        u1(j) = std::polar(1.0, k1 * t * eig.energies(j));
      const Eigen::MatrixXcd M =
          M1 * u1.asDiagonal() * M2 * u2.asDiagonal() * M3;
      for (int k0 = 0; k0 <= cfg.k0_max; ++k0) {
        Eigen::VectorXcd w(dim), z(dim);
        for (int m = 0; m < dim; ++m) {
          const complexd ph = std::polar(1.0, k0 * t * eig.energies(m));
          w(m) = std::conj(a(m)) * ph;
          z(m) = a(m) * ph;
        }
        const complexd truth = w.transpose() * M * z;
        out.g[k2](k0, k1) =
            sample_point(truth, cfg, k0, k1 * 4096 + k2, 0x3d);
      }
    }
  }
  return out;
}

std::vector<PathEntry> bin_amplitudes(
    const std::vector<std::pair<double, complexd>>& tones, double delta,
    double spectral_norm) {
  if (delta <= 0.0)
    throw std::invalid_argument("bin_amplitudes: delta must be positive");
  std::vector<std::pair<double, complexd>> sorted = tones;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const double width = spectral_norm * delta;
  std::vector<PathEntry> bins;
  for (const auto& [e, amp] : sorted) {
    if (!bins.empty() && e - bins.back().energies.back() <= width) {
      // extend bin; energies.back() tracks the last member for chaining
      PathEntry& b = bins.back();
      const double wa = std::abs(b.amp);
      const double wb = std::abs(amp);
      const double mean =
          (wa + wb) > 0 ? (b.energies[0] * wa + e * wb) / (wa + wb)
                        : 0.5 * (b.energies[0] + e);
      b.energies[0] = mean;
      b.energies.back() = e;
      b.amp += amp;
      continue;
    }
    PathEntry entry;
    entry.energies = {e, e};  // [weighted mean, last member]
    entry.amp = amp;
    bins.push_back(entry);
  }
  for (auto& b : bins) b.energies.resize(1);
  return bins;
}

namespace {

PronyOptions stage_options(const PPEConfig& cfg, int points) {
  PronyOptions opts;
  opts.allow_rank_reduction = true;
  if (cfg.shots > 0) {
    // 3x the per-tone noise floor of an N-shot M_T estimate spread over
    // the fit points
    opts.amp_threshold =
        3.0 * std::sqrt(2.0 / (double(cfg.shots) * double(points)));
  } else {
    opts.amp_threshold = 1e-9;
  }
  return opts;
}

// Stage-1 scan: tone at phase 2 t E0 for one k1 slice (or nullopt).
std::optional<complexd> ground_tone(const PhaseSignal& slice,
                                    const PronyOptions& opts, double t,
                                    double e0, double width, int n_tones) {
  SpectralEstimate est;
  try {
    est = prony(slice, n_tones, opts);
  } catch (const std::runtime_error&) {
    return std::nullopt;  // all-zero slice
  }
  std::optional<complexd> best;
  double best_dist = width;
  for (const auto& tone : est.tones) {
    const double dist = std::abs(tone.omega - 2.0 * t * e0);
    if (dist < best_dist) {
      best = tone.amp;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

PathAmplitudeSet nested_prony(const PhaseSignal2D& sig, const PPEConfig& cfg,
                              double spectral_norm, double e0_reference) {
  const double t = sig.t;
  const int K0 = static_cast<int>(sig.g.rows()) - 1;
  const int K1 = static_cast<int>(sig.g.cols()) - 1;
  const double width = t * spectral_norm * cfg.bin_width;
  const PronyOptions opts1 = stage_options(cfg, K0 + 1);

  PathAmplitudeSet out;
  out.ground_energy = e0_reference;

  // Stage 1: the alpha_00(k1) series from the 2 t E0 tone of each slice.
  PhaseSignal a00;
  a00.t = t;
  a00.g.assign(K1 + 1, complexd(0, 0));
  bool any = false;
  double e0_refined = e0_reference;
  for (int k1 = 0; k1 <= K1; ++k1) {
    PhaseSignal slice;
    slice.t = t;
    slice.g.resize(K0 + 1);
    for (int k0 = 0; k0 <= K0; ++k0) slice.g[k0] = sig.g(k0, k1);
    auto tone = ground_tone(slice, opts1, t, e0_reference, width,
                            (K0 + 1) / 2);
    if (tone) {
      a00.g[k1] = *tone;
      any = true;
    }
  }
  if (!any || std::abs(a00.g[0]) < opts1.amp_threshold) {
    // no ground-to-ground signal: the pair contributes nothing
    out.found_ground_tone = false;
    return out;
  }
  out.found_ground_tone = true;
  out.a0_norm = std::abs(a00.g[0]);

  // refine E0 from the k1 = 0 slice tone position
  {
    PhaseSignal slice;
    slice.t = t;
    slice.g.resize(K0 + 1);
    for (int k0 = 0; k0 <= K0; ++k0) slice.g[k0] = sig.g(k0, 0);
    SpectralEstimate est = prony(slice, (K0 + 1) / 2, opts1);
    for (const auto& tone : est.tones)
      if (std::abs(tone.omega - 2.0 * t * e0_reference) < width)
        e0_refined = tone.omega / (2.0 * t);
  }
  out.ground_energy = e0_refined;

  // Stage 2: tones of alpha_00(k1).
  const PronyOptions opts2 = stage_options(cfg, K1 + 1);
  SpectralEstimate est = prony(a00, (K1 + 1) / 2, opts2);
  std::vector<std::pair<double, complexd>> excited;
  for (const auto& tone : est.tones) {
    const double energy = tone.omega / t;
    if (std::abs(tone.omega - t * e0_refined) < width) {
      out.excluded_ground += tone.amp;  // ground-to-ground, excluded
      continue;
    }
    excited.push_back({energy, tone.amp});
  }
  out.entries = bin_amplitudes(excited, cfg.bin_width, spectral_norm);
  return out;
}

PathAmplitudeSet nested_prony_d3(const PhaseSignal3D& sig,
                                 const PPEConfig& cfg, double spectral_norm,
                                 double e0_reference) {
  const double t = sig.t;
  const int K2 = static_cast<int>(sig.g.size()) - 1;
  const int K1 = static_cast<int>(sig.g[0].cols()) - 1;
  const double width = t * spectral_norm * cfg.bin_width;

  PathAmplitudeSet out;
  out.ground_energy = e0_reference;

  // For each k2, run the two-stage extraction in (k0, k1); collect the
  // surviving (E_j1, amp(k2)) tones.
  std::vector<std::vector<std::pair<double, complexd>>> per_k2(K2 + 1);
  double a0 = 0.0;
  bool found = false;
  for (int k2 = 0; k2 <= K2; ++k2) {
    PhaseSignal2D slice2d;
    slice2d.t = t;
    slice2d.g = sig.g[k2];
    PathAmplitudeSet stage = nested_prony(slice2d, cfg, spectral_norm,
                                          e0_reference);
    if (k2 == 0 && stage.found_ground_tone) {
      a0 = stage.a0_norm;
      found = true;
    }
    for (const auto& e : stage.entries)
      per_k2[k2].push_back({e.energies[0], e.amp});
  }
  out.found_ground_tone = found;
  out.a0_norm = a0;
  if (!found) return out;

  // Match first-stage bins across k2 by energy, then Prony in k2.
  std::vector<std::pair<double, complexd>> all;
  for (const auto& v : per_k2) all.insert(all.end(), v.begin(), v.end());
  std::vector<PathEntry> centers =
      bin_amplitudes(all, cfg.bin_width, spectral_norm);
  const double ewidth = spectral_norm * cfg.bin_width;
  for (const auto& center : centers) {
    PhaseSignal series;
    series.t = t;
    series.g.assign(K2 + 1, complexd(0, 0));
    for (int k2 = 0; k2 <= K2; ++k2)
      for (const auto& [e, amp] : per_k2[k2])
        if (std::abs(e - center.energies[0]) <= ewidth) series.g[k2] += amp;
    const PronyOptions opts = stage_options(cfg, K2 + 1);
    SpectralEstimate est;
    try {
      est = prony(series, (K2 + 1) / 2, opts);
    } catch (const std::runtime_error&) {
      continue;
    }
    for (const auto& tone : est.tones) {
      const double e2 = tone.omega / t;
      if (std::abs(tone.omega - t * e0_reference) < width) {
        out.excluded_ground += tone.amp;  // second exclusion
        continue;
      }
      PathEntry entry;
      entry.energies = {center.energies[0], e2};
      entry.amp = tone.amp;
      out.entries.push_back(entry);
    }
  }
  return out;
}

double assemble_second_derivative(const std::vector<WeightedPathSet>& paths,
                                  double second_order_term, double e0,
                                  double a0, double exclusion_width) {
  if (a0 <= 0.0)
    throw std::invalid_argument("assemble_second_derivative: a0 must be > 0");
  double response = 0.0;
  for (const auto& wp : paths) {
    for (const auto& entry : wp.paths.entries) {
      const double eb = entry.energies.at(0);
      if (std::abs(eb - e0) < exclusion_width)
        throw std::runtime_error(
            "assemble_second_derivative: bin energy degenerate with E0");
      response += wp.weight * 2.0 * (entry.amp / a0).real() / (e0 - eb);
    }
  }
  return second_order_term + response;
}

OperatorFamily toy_xz_family() {
  OperatorFamily fam;
  fam.parameter_names = {"lambda_X", "lambda_Z"};
  // power-of-two step: the central-difference coefficients are exact
  fam.fd_steps = {0.25, 0.25};
  fam.evaluate = [](const std::vector<double>& l) {
    QubitOperator op(1);
    op.add("X", l.at(0));
    op.add("Z", l.at(1));
    if (op.empty()) op.add("I", 0.0);
    return op;
  };
  return fam;
}

PpeResult ppe_second_derivative(const OperatorFamily& family,
                                const std::vector<double>& lambda, int i,
                                int j, const PPEConfig& cfg,
                                const PreparedState* prep_in) {
  const QubitOperator H = family.evaluate(lambda);
  if (!H.is_hermitian())
    throw std::invalid_argument("ppe_second_derivative: family not Hermitian");
  const EigenDecomposition eig = diagonalize(H);
  PPEConfig local = cfg;
  local.t = effective_t(cfg, eig);

  PreparedState prep = prep_in ? *prep_in
                               : prepare_state(eig, PrepKind::Exact);
  const Eigen::VectorXcd ground = eig.states.col(0);

  const QubitOperator dHi = fd_operator_derivative(family, lambda, i, 1);
  const QubitOperator dHj = fd_operator_derivative(family, lambda, j, 1);
  const QubitOperator d2H = fd_operator_second(family, lambda, i, j);

  // <d2H/dl_i dl_j> on the prepared ground (Hellmann-Feynman-style term)
  double second_order = 0.0;
  if (!d2H.empty()) {
    if (local.shots > 0) {
      ShotConfig sc{local.shots, mix_seed(local.seed, 0xa2)};
      second_order = sample_expectation(ground, d2H, sc).value;
    } else {
      second_order = expectation(ground, d2H);
    }
  }

  const std::string identity(H.n_qubits(), 'I');
  auto drop_identity = [&](std::vector<UnitaryPart> parts) {
    std::vector<UnitaryPart> out;
    for (auto& p : parts)
      if (p.word != identity) out.push_back(std::move(p));
    return out;
  };
  const auto Ui = drop_identity(decompose_unitary(dHi));
  const auto Uj = drop_identity(decompose_unitary(dHj));

  // Calibration signal with identity excitations: stage-1 tone at 2 t E0
  // provides both the E0 reference and the normalization A0 = |a0|^2.
  const PauliTerm id_term{identity, 1.0};
  PPEConfig cal_cfg = local;
  cal_cfg.seed = mix_seed(local.seed, 0xca1);
  const PhaseSignal2D cal = ppe_signal(eig, prep, id_term, id_term, cal_cfg);
  double e0_est = 0.0, a0 = 0.0;
  {
    PhaseSignal slice;
    slice.t = cal.t;
    slice.g.resize(cal.g.rows());
    for (int k0 = 0; k0 < cal.g.rows(); ++k0) slice.g[k0] = cal.g(k0, 0);
    const PronyOptions opts = stage_options(local, (int)slice.g.size());
    SpectralEstimate est = prony(slice, ((int)slice.g.size()) / 2, opts);
    if (est.tones.empty())
      throw std::runtime_error("ppe: calibration signal has no tones");
    const Tone& g0 = est.tones.front();  // minimum phase = ground
    e0_est = g0.omega / (2.0 * local.t);
    a0 = std::abs(g0.amp);
  }

  // Analytic-mode resolvability check: coupled excited states closer to
  // E0 than the exclusion window cannot be separated from the ground
  // tone; refuse rather than silently fold them in.
  const double width = eig.spectral_norm() * local.bin_width;
  if (local.shots == 0) {
    for (int s = 1; s < eig.dim(); ++s) {
      const double de = std::abs(eig.energies(s) - eig.energies(0));
      if (de > 1e-12 && de < width)
        throw std::runtime_error(
            "ppe: excited state within the ground exclusion window; "
            "reduce bin_width");
    }
  }

  std::vector<WeightedPathSet> sets;
  int pair_count = 0;
  double post_p = 1.0;
  for (const auto& pu : Ui) {
    for (const auto& qu : Uj) {
      const double w = (pu.weight * qu.weight).real();
      PPEConfig pair_cfg = local;
      pair_cfg.seed = mix_seed(local.seed, 0xbeef + pair_count);
      WeightedPathSet set;
      set.weight = w;
      if (local.prep == PPEConfig::Prep::Vqe) {
        VqeSignal vs = ppe_signal_vqe(eig, prep, PauliTerm{pu.word, 1.0},
                                      PauliTerm{qu.word, 1.0}, pair_cfg);
        post_p = std::min(post_p, vs.mean_postselect_probability);
        // single-stage extraction: tones of g(k) directly
        const PronyOptions opts =
            stage_options(pair_cfg, (int)vs.sig.g.size());
        SpectralEstimate est;
        try {
          est = prony(vs.sig, ((int)vs.sig.g.size()) / 2, opts);
        } catch (const std::runtime_error&) {
          est = {};
        }
        set.paths.found_ground_tone = true;
        set.paths.a0_norm = 1.0;  // no |a0|^2 factor with post-selection
        std::vector<std::pair<double, complexd>> excited;
        for (const auto& tone : est.tones) {
          const double energy = tone.omega / local.t;
          if (std::abs(tone.omega - local.t * e0_est) <
              local.t * eig.spectral_norm() * local.bin_width) {
            set.paths.excluded_ground += tone.amp;
            continue;
          }
          excited.push_back({energy, tone.amp});
        }
        set.paths.entries =
            bin_amplitudes(excited, local.bin_width, eig.spectral_norm());
      } else {
        const PhaseSignal2D sig = ppe_signal(
            eig, prep, PauliTerm{pu.word, 1.0}, PauliTerm{qu.word, 1.0},
            pair_cfg);
        set.paths = nested_prony(sig, pair_cfg, eig.spectral_norm(), e0_est);
      }
      sets.push_back(std::move(set));
      ++pair_count;
    }
  }

  const double a0_used = local.prep == PPEConfig::Prep::Vqe ? 1.0 : a0;
  PpeResult res;
  res.value = assemble_second_derivative(sets, second_order, e0_est, a0_used,
                                         width);
  res.diag.e0 = e0_est;
  res.diag.a0 = a0;
  res.diag.t = local.t;
  res.diag.n_unitary_pairs = pair_count;
  res.diag.postselect_probability = post_p;
  // eps_D <= d N_A^(1/2) delta^(d-2) |H| Delta with d = 2
  res.diag.resolution_error_bound =
      2.0 * std::sqrt(double(std::max(1, pair_count))) *
      eig.spectral_norm() * local.bin_width;
  if (local.shots > 0) {
    const double delta_gap = eig.gap();
    const double n_a = double(std::max(1, pair_count));
    const double ktot = double(local.k0_max + local.k1_max);
    const double var =
        n_a * (std::pow(delta_gap, 2.0) * std::sqrt(local.bin_width) /
                   (double(local.shots) * a0_used) +
               2.0 * std::pow(local.bin_width, 2.0) /
                   (ktot * ktot * local.t * local.t * a0_used * a0_used));
    res.diag.sampling_error_estimate = std::sqrt(var);
  }
  return res;
}

}  // namespace qderiv
