#include "qderiv/gradients.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qderiv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

QubitOperator number_operator(int n_so) {
  QubitOperator op(n_so);
  op.add(std::string(n_so, 'I'), 0.5 * n_so);
  for (int p = 0; p < n_so; ++p) {
    std::string w(n_so, 'I');
    w[p] = 'Z';
    op.add(w, -0.5);
  }
  return op;
}

double sector_ground_energy(const QubitOperator& op, int n_elec) {
  const EigenDecomposition eig = diagonalize(op);
  const QubitOperator num = number_operator(op.n_qubits());
  for (int j = 0; j < eig.dim(); ++j) {
    const double n = expectation(eig.states.col(j), num);
    if (std::abs(n - n_elec) < 1e-6) return eig.energies(j);
  }
  throw std::runtime_error("sector_ground_energy: sector not found");
}

double fci_ground_energy(double bond_length_angstrom) {
  // reduced 2-qubit ground equals the 2-electron-sector FCI energy
  static const OperatorFamily fam = h2_geometry_family(2);
  const EigenDecomposition eig =
      diagonalize(fam.evaluate({bond_length_angstrom}));
  return eig.energies(0);
}

Estimate hellmann_feynman_gradient(const OperatorFamily& family,
                                   const std::vector<double>& lambda,
                                   int which, EstimationMode mode,
                                   const ShotConfig& cfg,
                                   const Eigen::VectorXcd* state) {
  const QubitOperator dH = fd_operator_derivative(family, lambda, which, 1);
  Eigen::VectorXcd psi;
  if (state) {
    psi = *state;
  } else {
    const EigenDecomposition eig = diagonalize(family.evaluate(lambda));
    psi = eig.states.col(0);
  }
  if (mode == EstimationMode::Exact)
    return Estimate{expectation(psi, dH), 0.0};
  return sample_expectation(psi, dH, cfg);
}

FdResult direct_fd_derivative(const std::function<Estimate(double)>& energy,
                              double at, int order, double step) {
  if (step <= 0.0)
    throw std::invalid_argument("direct_fd_derivative: step must be > 0");
  FdResult out;
  if (order == 1) {
    const Estimate ep = energy(at + step / 2.0);
    const Estimate em = energy(at - step / 2.0);
    out.value = (ep.value - em.value) / step;
    out.std_error = std::sqrt(ep.std_error * ep.std_error +
                              em.std_error * em.std_error) /
                    step;
    out.noise_amplification = 1.0 / step;
    return out;
  }
  if (order == 2) {
    const Estimate ep = energy(at + step);
    const Estimate em = energy(at - step);
    const Estimate e0 = energy(at);
    out.value = (ep.value + em.value - 2.0 * e0.value) / (step * step);
    out.std_error = std::sqrt(ep.std_error * ep.std_error +
                              em.std_error * em.std_error +
                              4.0 * e0.std_error * e0.std_error) /
                    (step * step);
    out.noise_amplification = 1.0 / (step * step);
    return out;
  }
  throw std::invalid_argument("direct_fd_derivative: order must be 1 or 2");
}

double hf_hessian(double bond_length_angstrom, double step) {
  auto hf = [](double r) { return Estimate{hf_energy(r), 0.0}; };
  return direct_fd_derivative(hf, bond_length_angstrom, 2, step).value;
}

namespace {

struct Evaluator {
  const OperatorFamily& family;
  const OptimizeConfig& cfg;
  HessianSource hessian_source;
  std::vector<QubitOperator> excitations;
  OptTrace* trace;
  int call = 0;

  double energy(double r) {
    ++trace->n_energy_evals;
    const EigenDecomposition eig = diagonalize(family.evaluate({r}));
    if (cfg.mode == EstimationMode::Exact) return eig.energies(0);
    ShotConfig sc = cfg.shots;
    sc.seed = mix_seed(cfg.shots.seed, 0xe0000 + ++call);
    return sample_expectation(eig.states.col(0), family.evaluate({r}), sc)
        .value;
  }

  double gradient(double r) {
    ++trace->n_gradient_evals;
    ShotConfig sc = cfg.shots;
    sc.seed = mix_seed(cfg.shots.seed, 0x90000 + ++call);
    return hellmann_feynman_gradient(family, {r}, 0, cfg.mode, sc).value;
  }

  double hessian(double r) {
    ++trace->n_hessian_evals;
    if (hessian_source == HessianSource::HartreeFock) return hf_hessian(r);
    EtaOptions opts;
    opts.mode = cfg.mode;
    opts.shots = cfg.shots;
    opts.shots.seed = mix_seed(cfg.shots.seed, 0x40000 + ++call);
    return eta_second_derivative(family, {r}, 0, 0, excitations, opts);
  }
};

}  // namespace

OptTrace optimize_geometry(OptMethod method, HessianSource hessian_source,
                           double start_r, const OptimizeConfig& cfg) {
  if (start_r < cfg.r_min || start_r > cfg.r_max)
    throw std::invalid_argument(
        "optimize_geometry: start outside [r_min, r_max]");
  OptTrace trace;
  const OperatorFamily family = h2_geometry_family(2);
  Evaluator ev{family, cfg, hessian_source,
               parse_excitations(cfg.excitations, 2), &trace};

  auto clamp_r = [&](double r) { return std::max(cfg.r_min, r); };

  if (method == OptMethod::Newton) {
    double r = start_r;
    for (int it = 1; it <= cfg.max_iter; ++it) {
      const double e = ev.energy(r);
      const double j = ev.gradient(r);
      const double k = ev.hessian(r);
      trace.iterates.push_back({it, r, e, j, k});
      if (std::abs(j) < cfg.tol) {
        trace.converged = true;
        trace.status = "gradient below tolerance";
        break;
      }
      double step;
      if (std::abs(k) < 1e-8) {
        step = j;  // Hessian unusable: plain gradient step
        trace.status = "hessian fallback used";
      } else {
        step = j / std::abs(k);
      }
      step = std::clamp(step, -cfg.max_step, cfg.max_step);
      r = clamp_r(r - step);
    }
    if (!trace.converged && trace.status.empty())
      trace.status = "max iterations reached";
    trace.final_r = trace.iterates.back().r;
    trace.final_energy = trace.iterates.back().energy;
    return trace;
  }

  if (method == OptMethod::ConjugateGradient) {
    double r = start_r;
    double g = ev.gradient(r);
    double e = ev.energy(r);
    double d = -g;
    for (int it = 1; it <= cfg.max_iter; ++it) {
      trace.iterates.push_back({it, r, e, g, kNaN});
      if (std::abs(g) < cfg.tol) {
        trace.converged = true;
        trace.status = "gradient below tolerance";
        break;
      }
      if (d * g >= 0) d = -g;  // restart on a non-descent direction
      double alpha = std::min(cfg.max_step / std::abs(d), 1.0);
      double e_new = ev.energy(clamp_r(r + alpha * d));
      int backtracks = 0;
      while (e_new > e + 1e-4 * alpha * g * d && backtracks < 30) {
        alpha *= 0.5;
        e_new = ev.energy(clamp_r(r + alpha * d));
        ++backtracks;
      }
      const double r_new = clamp_r(r + alpha * d);
      const double g_new = ev.gradient(r_new);
      const double beta = std::max(0.0, g_new * (g_new - g) / (g * g));
      d = -g_new + beta * d;
      r = r_new;
      g = g_new;
      e = e_new;
    }
    if (!trace.converged) trace.status = "max iterations reached";
    trace.final_r = r;
    trace.final_energy = e;
    return trace;
  }

  // Nelder-Mead in one dimension: reflection / expansion / contraction /
  // shrink on a two-point simplex, terminating on simplex width.
  double a = start_r;
  double b = clamp_r(start_r - cfg.simplex_width);
  double fa = ev.energy(a), fb = ev.energy(b);
  for (int it = 1; it <= 4 * cfg.max_iter; ++it) {
    if (fb < fa) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
    trace.iterates.push_back({it, a, fa, kNaN, kNaN});
    if (std::abs(a - b) < cfg.tol) break;
    const double xr = clamp_r(a + (a - b));  // reflect worst through best
    const double fr = ev.energy(xr);
    if (fr < fa) {
      const double xe = clamp_r(a + 2.0 * (a - b));
      const double fe = ev.energy(xe);
      if (fe < fr) {
        b = xe;
        fb = fe;
      } else {
        b = xr;
        fb = fr;
      }
    } else {
      const double xc = a + 0.5 * (b - a);  // contract
      const double fc = ev.energy(xc);
      if (fc < fb) {
        b = xc;
        fb = fc;
      } else {
        b = a + 0.5 * (b - a);  // shrink toward best
        fb = ev.energy(b);
      }
    }
  }
  const double g_final = ev.gradient(a);
  trace.converged = std::abs(g_final) < cfg.tol;
  trace.status = trace.converged ? "simplex converged"
                                 : "simplex stalled above tolerance";
  trace.final_r = a;
  trace.final_energy = fa;
  if (!trace.iterates.empty()) trace.iterates.back().gradient = g_final;
  return trace;
}

double polarizability_zz(double bond_length_angstrom, DerivMethod method,
                         int qubit_space) {
  if (qubit_space != 2 && qubit_space != 4)
    throw std::invalid_argument("polarizability_zz: qubit_space must be 2|4");
  const OperatorFamily family =
      h2_field_family(bond_length_angstrom, qubit_space);
  double d2;
  if (method == DerivMethod::Fd) {
    auto energy = [&](double f) {
      const QubitOperator h = family.evaluate({f});
      const double e = qubit_space == 4 ? sector_ground_energy(h, 2)
                                        : diagonalize(h).energies(0);
      return Estimate{e, 0.0};
    };
    d2 = direct_fd_derivative(energy, 0.0, 2, family.fd_steps[0]).value;
  } else {
    const std::vector<QubitOperator> excitations =
        qubit_space == 4 ? sd_excitations(4) : complete_pauli_excitations(2);
    d2 = eta_second_derivative(family, {0.0}, 0, 0, excitations);
  }
  return -d2;
}

}  // namespace qderiv
