#pragma once

// End-to-end orchestration shared by the C API and the CLI:
// reduce -> classify -> approximate -> refine -> globalize.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paramfold/approx.hpp"
#include "paramfold/io.hpp"
#include "paramfold/model.hpp"
#include "paramfold/refine.hpp"

namespace paramfold {

struct PipelineOptions {
  Branch branch = Branch::Stable;
  Family family = Family::Primary;
  int order = 10;
  std::optional<double> rho;  // unset: select_rho on the curve's R
  double tol = 1e-13;
  int m = 32;
  double tie_break_x = 0.0;
  bool use_gamma = false;     // refine T_gamma^-1 F T_gamma instead of F
};

// Reduced map with the hypothesis reports of both branches.
struct Classified {
  PlanarMapSpec spec;
  ReducedMap rm;
  std::vector<HypothesisReport> reports;  // stable, unstable; empty if unclassified
};

// Never throws on a degenerate map; rm.tag stays empty then.
Classified classify_spec(const PlanarMapSpec& spec);

// Formal pair on the requested branch, computed directly on the reduced
// map (R_N > 0 for the unstable branch). Throws Hypothesis when the
// branch's necessary conditions fail.
Approximation approximate_spec(const Classified& cl, const PipelineOptions& opts);

// Refined curve. Unstable curves are solved as stable curves of the
// reduced inverse map.
std::unique_ptr<RefinedCurve> refine_spec(const Classified& cl, const PipelineOptions& opts,
                                          const std::function<void(const SweepRecord&)>& on_sweep = {});

// t_i = tmax / 1.2^(samples-1-i), increasing. samples = 0 picks a count
// reaching down to about tmax / 1000.
std::vector<double> curve_parameters(double tmax, int samples);

struct CurveSamples {
  std::vector<CurveRow> rows;
  std::optional<std::string> error;  // set when evaluation stopped early
};

// Rows in input coordinates with residual F(K(t)) - K(R(t)).
CurveSamples sample_curve(const RefinedCurve& curve, const std::vector<double>& ts);

}  // namespace paramfold
