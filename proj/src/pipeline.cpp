#include "paramfold/pipeline.hpp"

#include <cmath>

#include "paramfold/dynamics.hpp"
#include "paramfold/error.hpp"

namespace paramfold {

namespace {

void require_hypotheses(const Classified& cl, Branch branch) {
  if (!cl.rm.tag) classify(cl.rm);  // throws the degenerate-map error
  const HypothesisReport& rep = cl.reports[branch == Branch::Stable ? 0 : 1];
  if (rep.analytic_ok()) return;
  std::string failed;
  for (const auto& c : rep.analytic) {
    if (c.passed) continue;
    if (!failed.empty()) failed += "; ";
    failed += c.name + " (" + c.detail + ")";
  }
  fail(ErrorKind::Hypothesis,
       std::string("hypotheses for the ") + to_string(branch) + " curve fail: " + failed);
}

}  // namespace

Classified classify_spec(const PlanarMapSpec& spec) {
  Classified cl{spec, reduce(spec), {}};
  if (cl.rm.tag) {
    cl.reports.push_back(check_hypotheses(cl.rm, Branch::Stable));
    cl.reports.push_back(check_hypotheses(cl.rm, Branch::Unstable));
  }
  return cl;
}

Approximation approximate_spec(const Classified& cl, const PipelineOptions& opts) {
  require_hypotheses(cl, opts.branch);
  return approximate(cl.rm, opts.branch, opts.order, {opts.family, opts.tie_break_x});
}

std::unique_ptr<RefinedCurve> refine_spec(const Classified& cl, const PipelineOptions& opts,
                                          const std::function<void(const SweepRecord&)>& on_sweep) {
  require_hypotheses(cl, opts.branch);
  ReducedMap working = opts.branch == Branch::Stable ? cl.rm : unstable_setup(cl.rm);
  const Approximation ap =
      approximate(working, Branch::Stable, opts.order, {opts.family, opts.tie_break_x});
  RefineConfig cfg;
  cfg.m = opts.m;
  cfg.tol = opts.tol;
  cfg.rho = opts.rho ? *opts.rho : select_rho(InnerDynamics(ap.par.R, ap.par.N));
  if (!(cfg.rho > 0.0)) fail(ErrorKind::Argument, "rho must be positive");
  if (opts.use_gamma) cfg.gamma = rescale_gamma(working, Branch::Stable);
  RefineState st = picard_solve(working, ap.par, cfg, on_sweep);
  return std::make_unique<RefinedCurve>(std::move(working), ap.par, std::move(st),
                                        PolynomialMap::from_spec(cl.spec), opts.branch);
}

std::vector<double> curve_parameters(double tmax, int samples) {
  if (!(tmax > 0.0)) fail(ErrorKind::Argument, "tmax must be positive");
  if (samples < 0) fail(ErrorKind::Argument, "samples must be nonnegative");
  if (samples == 0) samples = 1 + static_cast<int>(std::ceil(std::log(1000.0) / std::log(1.2)));
  std::vector<double> ts;
  for (int i = 0; i < samples; ++i) ts.push_back(tmax / std::pow(1.2, samples - 1 - i));
  return ts;
}

CurveSamples sample_curve(const RefinedCurve& curve, const std::vector<double>& ts) {
  CurveSamples out;
  for (double t : ts) {
    try {
      out.rows.push_back({t, curve.eval(t).p, curve.residual(t)});
    } catch (const Error& e) {
      out.error = "evaluation stopped at t = " + std::to_string(t) + ": " + e.what();
      break;
    }
  }
  return out;
}

}  // namespace paramfold
