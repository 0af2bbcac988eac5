#include <cmath>
#include <limits>
#include <memory>

#include "trendqp/errors.hpp"
#include "trendqp/models.hpp"
#include "trendqp/normal.hpp"

namespace trendqp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BlockEval {
  double value = 0.0;
  std::vector<double> grad;
  BandedSymMatrix nh;
  explicit BlockEval(std::size_t T)
      : grad(T, 0.0), nh(T, T == 1 ? 0 : 1) {}
};

struct RwSpec {
  double x0;                // fixed pre-sample value
  double v1;                // variance of the first increment
  double vstep;             // variance of later increments
  Bound lo, hi;             // box of the walk (truncation of each increment)
  bool normalizers = true;  // include the -ln Z(x_{t-1}) truncation terms
};

// Random-walk kernel terms -(x_t - x_{t-1})^2 / (2 v_t) plus, when the walk
// is boxed, the increment normalizers -ln Z(x_{t-1}) for t >= 2. The t = 1
// normalizer depends only on the fixed x0 and is dropped as a constant.
void add_rw_terms(const RwSpec& rw, std::span<const double> x, BlockEval& e) {
  const std::size_t T = x.size();
  const bool truncated =
      rw.normalizers && (rw.lo.is_finite() || rw.hi.is_finite());
  double prev = rw.x0;
  for (std::size_t t = 0; t < T; ++t) {
    const double v = (t == 0) ? rw.v1 : rw.vstep;
    const double d = x[t] - prev;
    e.value += -d * d / (2.0 * v);
    e.grad[t] += -d / v;
    e.nh.diag(0, t) += 1.0 / v;
    if (t > 0) {
      e.grad[t - 1] += d / v;
      e.nh.diag(0, t - 1) += 1.0 / v;
      e.nh.diag(1, t - 1) += -1.0 / v;
      if (truncated) {
        const IntervalMassDerivs r =
            norm_interval_mass_derivs(rw.lo, rw.hi, x[t - 1], v);
        e.value += -r.log_mass;
        e.grad[t - 1] += -r.d1;
        e.nh.diag(0, t - 1) += r.d2;
      }
    }
    prev = x[t];
  }
}

// Shared snapshot of everything the three block targets condition on.
struct BoundedCtx {
  BoundedData data;
  std::vector<double> tau, rho, h;
  double sigma_tau2, sigma_rho2, sigma_h2;
  BoundedHyper hyper;

  std::size_t T() const { return data.pi.size(); }
  std::size_t meas_start() const { return data.pi0 ? 1 : 2; }  // 1-based t

  // Gap pi_{t-1} - tau_{t-1} ahead of measurement t; t >= meas_start().
  double gap_prev(std::span<const double> tau_vec, std::size_t t) const {
    if (t == 1) return *data.pi0 - hyper.tau0;
    return data.pi[t - 2] - tau_vec[t - 2];
  }
};

std::shared_ptr<const BoundedCtx> make_ctx(const BoundedState& s,
                                           const BoundedData& d,
                                           const BoundedHyper& hy) {
  const std::size_t T = d.pi.size();
  if (T == 0) throw DimensionError("bounded target: empty data");
  if (s.tau.size() != T || s.rho.size() != T || s.h.size() != T)
    throw DimensionError("bounded target: state/data length mismatch");
  hy.validate();
  auto c = std::make_shared<BoundedCtx>();
  c->data = d;
  c->tau = s.tau;
  c->rho = s.rho;
  c->h = s.h;
  c->sigma_tau2 = s.sigma_tau2;
  c->sigma_rho2 = s.sigma_rho2;
  c->sigma_h2 = s.sigma_h2;
  c->hyper = hy;
  return c;
}

BlockEval eval_tau(const BoundedCtx& c, std::span<const double> tau,
                   bool normalizers = true) {
  const std::size_t T = c.T();
  BlockEval e(T);
  for (std::size_t t = c.meas_start(); t <= T; ++t) {
    const double g_prev = c.gap_prev(tau, t);
    const double rho_t = c.rho[t - 1];
    const double s = (c.data.pi[t - 1] - tau[t - 1]) - rho_t * g_prev;
    const double w = std::exp(c.h[t - 1]);
    e.value += -s * s / (2.0 * w);
    e.grad[t - 1] += s / w;
    e.nh.diag(0, t - 1) += 1.0 / w;
    if (t >= 2) {
      e.grad[t - 2] += -s * rho_t / w;
      e.nh.diag(0, t - 2) += rho_t * rho_t / w;
      e.nh.diag(1, t - 2) += -rho_t / w;
    }
  }
  add_rw_terms({c.hyper.tau0, c.hyper.omega_tau2, c.sigma_tau2, c.hyper.a_tau,
                c.hyper.b_tau, normalizers},
               tau, e);
  return e;
}

BlockEval eval_rho(const BoundedCtx& c, std::span<const double> rho,
                   bool normalizers = true) {
  const std::size_t T = c.T();
  BlockEval e(T);
  for (std::size_t t = c.meas_start(); t <= T; ++t) {
    const double g_prev = c.gap_prev(c.tau, t);
    const double s =
        (c.data.pi[t - 1] - c.tau[t - 1]) - rho[t - 1] * g_prev;
    const double w = std::exp(c.h[t - 1]);
    e.value += -s * s / (2.0 * w);
    e.grad[t - 1] += s * g_prev / w;
    e.nh.diag(0, t - 1) += g_prev * g_prev / w;
  }
  add_rw_terms({c.hyper.rho0, c.hyper.omega_rho2, c.sigma_rho2, c.hyper.a_rho,
                c.hyper.b_rho, normalizers},
               rho, e);
  return e;
}

BlockEval eval_h(const BoundedCtx& c, std::span<const double> h) {
  const std::size_t T = c.T();
  BlockEval e(T);
  for (std::size_t t = c.meas_start(); t <= T; ++t) {
    const double g_prev = c.gap_prev(c.tau, t);
    const double s =
        (c.data.pi[t - 1] - c.tau[t - 1]) - c.rho[t - 1] * g_prev;
    const double s2e = s * s * std::exp(-h[t - 1]);
    e.value += -0.5 * h[t - 1] - 0.5 * s2e;
    e.grad[t - 1] += -0.5 + 0.5 * s2e;
    e.nh.diag(0, t - 1) += 0.5 * s2e;
  }
  add_rw_terms({c.hyper.h0, c.hyper.omega_h2, c.sigma_h2, Bound::neg_inf(),
                Bound::pos_inf()},
               h, e);
  return e;
}

template <typename EvalFn>
SmoothTarget make_target(std::shared_ptr<const BoundedCtx> ctx, Box box,
                         EvalFn eval) {
  SmoothTarget t;
  t.dim = ctx->T();
  t.box = std::move(box);
  t.log_density = [ctx, eval](std::span<const double> x) {
    return eval(*ctx, x).value;
  };
  t.gradient = [ctx, eval](std::span<const double> x) {
    return eval(*ctx, x).grad;
  };
  t.neg_hessian = [ctx, eval](std::span<const double> x) {
    return eval(*ctx, x).nh;
  };
  return t;
}

// Variance conditional for a boxed random walk: inverse-gamma prior times the
// t >= 2 truncated-increment densities. Conjugate when the box is unbounded;
// otherwise one slice-sampling update on ln(variance) against the exact
// conditional including normalizers.
double draw_walk_variance(std::span<const double> x, Bound lo, Bound hi,
                          double nu, double S, double current,
                          RngStream& rng) {
  const std::size_t T = x.size();
  if (T < 2) return sample_inv_gamma(nu, S, rng);

  double ssd = 0.0;
  for (std::size_t t = 1; t < T; ++t) {
    const double d = x[t] - x[t - 1];
    ssd += d * d;
  }
  const double n_inc = static_cast<double>(T - 1);
  if (!lo.is_finite() && !hi.is_finite())
    return sample_inv_gamma(nu + 0.5 * n_inc, S + 0.5 * ssd, rng);

  const auto log_f = [&](double v) -> double {
    const double sigma2 = std::exp(v);
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) return kNegInf;
    // + v is the Jacobian of the log-variance reparameterization.
    double lf = log_inv_gamma_pdf(sigma2, nu, S) + v;
    lf += -0.5 * n_inc * v - 0.5 * ssd / sigma2;
    const double sd = std::sqrt(sigma2);
    for (std::size_t t = 1; t < T; ++t)
      lf -= log_norm_interval_mass((lo.value() - x[t - 1]) / sd,
                                   (hi.value() - x[t - 1]) / sd);
    return lf;
  };
  return std::exp(slice_sample_1d(log_f, std::log(current), rng, 0.5));
}

}  // namespace

void BoundedHyper::validate() const {
  if (!(omega_tau2 > 0.0) || !(omega_rho2 > 0.0) || !(omega_h2 > 0.0))
    throw ParameterError("BoundedHyper: initial variances must be positive");
  if (!(nu_tau > 0.0) || !(S_tau > 0.0) || !(nu_rho > 0.0) || !(S_rho > 0.0) ||
      !(nu_h > 0.0) || !(S_h > 0.0))
    throw ParameterError("BoundedHyper: inverse-gamma hyperparameters must be positive");
  if (!std::isfinite(tau0) || !std::isfinite(rho0) || !std::isfinite(h0))
    throw ParameterError("BoundedHyper: initial means must be finite");
  if (!(a_tau.value() < b_tau.value()) || !(a_rho.value() < b_rho.value()))
    throw ParameterError("BoundedHyper: requires a < b for both boxes");
}

void BoundedState::validate(const BoundedHyper& hyper) const {
  const std::size_t T = tau.size();
  if (rho.size() != T || h.size() != T)
    throw DimensionError("BoundedState: component length mismatch");
  if (!(sigma_tau2 > 0.0) || !(sigma_rho2 > 0.0) || !(sigma_h2 > 0.0))
    throw ParameterError("BoundedState: variances must be positive");
  if (!hyper.tau_box(T).contains(tau))
    throw ParameterError("BoundedState: tau outside its box");
  if (!hyper.rho_box(T).contains(rho))
    throw ParameterError("BoundedState: rho outside its box");
  for (double v : h)
    if (!std::isfinite(v)) throw ParameterError("BoundedState: h not finite");
}

SmoothTarget bounded_tau_target(const BoundedState& state,
                                const BoundedData& data,
                                const BoundedHyper& hyper) {
  auto ctx = make_ctx(state, data, hyper);
  return make_target(ctx, hyper.tau_box(ctx->T()),
                     [](const BoundedCtx& c, std::span<const double> x) {
                       return eval_tau(c, x);
                     });
}

SmoothTarget bounded_rho_target(const BoundedState& state,
                                const BoundedData& data,
                                const BoundedHyper& hyper) {
  auto ctx = make_ctx(state, data, hyper);
  return make_target(ctx, hyper.rho_box(ctx->T()),
                     [](const BoundedCtx& c, std::span<const double> x) {
                       return eval_rho(c, x);
                     });
}

SmoothTarget bounded_tau_proposal_target(const BoundedState& state,
                                         const BoundedData& data,
                                         const BoundedHyper& hyper) {
  auto ctx = make_ctx(state, data, hyper);
  return make_target(ctx, hyper.tau_box(ctx->T()),
                     [](const BoundedCtx& c, std::span<const double> x) {
                       return eval_tau(c, x, false);
                     });
}

SmoothTarget bounded_rho_proposal_target(const BoundedState& state,
                                         const BoundedData& data,
                                         const BoundedHyper& hyper) {
  auto ctx = make_ctx(state, data, hyper);
  return make_target(ctx, hyper.rho_box(ctx->T()),
                     [](const BoundedCtx& c, std::span<const double> x) {
                       return eval_rho(c, x, false);
                     });
}

SmoothTarget bounded_h_target(const BoundedState& state,
                              const BoundedData& data,
                              const BoundedHyper& hyper) {
  auto ctx = make_ctx(state, data, hyper);
  return make_target(ctx, Box::unbounded(ctx->T()),
                     [](const BoundedCtx& c, std::span<const double> x) {
                       return eval_h(c, x);
                     });
}

void bounded_sample_variances(BoundedState& s, const BoundedHyper& hyper,
                              RngStream& rng) {
  const std::size_t T = s.tau.size();
  if (s.rho.size() != T || s.h.size() != T)
    throw DimensionError("bounded_sample_variances: length mismatch");
  s.sigma_tau2 = draw_walk_variance(s.tau, hyper.a_tau, hyper.b_tau,
                                    hyper.nu_tau, hyper.S_tau, s.sigma_tau2,
                                    rng);
  s.sigma_rho2 = draw_walk_variance(s.rho, hyper.a_rho, hyper.b_rho,
                                    hyper.nu_rho, hyper.S_rho, s.sigma_rho2,
                                    rng);
  if (T < 2) {
    s.sigma_h2 = sample_inv_gamma(hyper.nu_h, hyper.S_h, rng);
  } else {
    double ssd = 0.0;
    for (std::size_t t = 1; t < T; ++t) {
      const double d = s.h[t] - s.h[t - 1];
      ssd += d * d;
    }
    s.sigma_h2 = sample_inv_gamma(
        hyper.nu_h + 0.5 * static_cast<double>(T - 1), hyper.S_h + 0.5 * ssd,
        rng);
  }
}

BoundedState bounded_draw_params(const BoundedHyper& hyper, RngStream& rng) {
  hyper.validate();
  BoundedState s;
  s.sigma_tau2 = sample_inv_gamma(hyper.nu_tau, hyper.S_tau, rng);
  s.sigma_rho2 = sample_inv_gamma(hyper.nu_rho, hyper.S_rho, rng);
  s.sigma_h2 = sample_inv_gamma(hyper.nu_h, hyper.S_h, rng);
  return s;
}

void bounded_draw_states(BoundedState& s, std::size_t T,
                         const BoundedHyper& hyper, RngStream& rng) {
  if (T == 0) throw DimensionError("bounded_draw_states: T must be >= 1");
  s.tau.resize(T);
  s.rho.resize(T);
  s.h.resize(T);
  double prev = hyper.tau0;
  for (std::size_t t = 0; t < T; ++t) {
    prev = sample_trunc_normal(hyper.a_tau, hyper.b_tau, prev,
                               t == 0 ? hyper.omega_tau2 : s.sigma_tau2, rng);
    s.tau[t] = prev;
  }
  prev = hyper.rho0;
  for (std::size_t t = 0; t < T; ++t) {
    prev = sample_trunc_normal(hyper.a_rho, hyper.b_rho, prev,
                               t == 0 ? hyper.omega_rho2 : s.sigma_rho2, rng);
    s.rho[t] = prev;
  }
  prev = hyper.h0;
  for (std::size_t t = 0; t < T; ++t) {
    prev = sample_normal(prev, t == 0 ? hyper.omega_h2 : s.sigma_h2, rng);
    s.h[t] = prev;
  }
}

std::vector<double> bounded_draw_data(const BoundedState& s, double pi0,
                                      const BoundedHyper& hyper,
                                      RngStream& rng) {
  const std::size_t T = s.tau.size();
  std::vector<double> pi(T);
  double g_prev = pi0 - hyper.tau0;
  for (std::size_t t = 0; t < T; ++t) {
    const double g =
        s.rho[t] * g_prev + std::exp(0.5 * s.h[t]) * rng.normal();
    pi[t] = s.tau[t] + g;
    g_prev = g;
  }
  return pi;
}

}  // namespace trendqp
