#include "paramfold/paramfold.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "paramfold/dynamics.hpp"
#include "paramfold/error.hpp"
#include "paramfold/io.hpp"
#include "paramfold/pipeline.hpp"

using namespace paramfold;

struct pf_map {
  Classified cl;
};

struct pf_curve {
  std::unique_ptr<RefinedCurve> curve;
};

namespace {

thread_local std::string g_last_error;

pf_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input: return PF_ERR_INPUT;
    case ErrorKind::Hypothesis: return PF_ERR_HYPOTHESIS;
    case ErrorKind::Numeric: return PF_ERR_NUMERIC;
    case ErrorKind::Argument: return PF_ERR_ARGUMENT;
  }
  return PF_ERR_ARGUMENT;
}

template <class Fn>
pf_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PF_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PF_ERR_NUMERIC;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

PipelineOptions convert(const pf_options* o) {
  pf_options def;
  pf_options_default(&def);
  if (!o) o = &def;
  if (o->branch != PF_STABLE && o->branch != PF_UNSTABLE) fail(ErrorKind::Argument, "unknown branch");
  if (o->family != PF_PRIMARY && o->family != PF_SECONDARY) fail(ErrorKind::Argument, "unknown family");
  if (o->order < 1) fail(ErrorKind::Argument, "order must be at least 1");
  if (o->m < 4) fail(ErrorKind::Argument, "m must be at least 4");
  if (!(o->tol > 0.0)) fail(ErrorKind::Argument, "tol must be positive");
  PipelineOptions p;
  p.branch = o->branch == PF_STABLE ? Branch::Stable : Branch::Unstable;
  p.family = o->family == PF_PRIMARY ? Family::Primary : Family::Secondary;
  p.order = o->order;
  if (o->rho > 0.0) p.rho = o->rho;
  p.tol = o->tol;
  p.m = o->m;
  p.tie_break_x = o->tie_break_x;
  p.use_gamma = o->use_gamma != 0;
  return p;
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorKind::Argument, std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* pf_version(void) { return "0.1.0"; }

const char* pf_last_error(void) { return g_last_error.c_str(); }

void pf_string_free(char* s) { std::free(s); }

void pf_options_default(pf_options* opts) {
  if (!opts) return;
  opts->branch = PF_STABLE;
  opts->family = PF_PRIMARY;
  opts->order = 10;
  opts->rho = 0.0;
  opts->tol = 1e-13;
  opts->m = 32;
  opts->tie_break_x = 0.0;
  opts->use_gamma = 0;
}

pf_status pf_map_from_json(const char* text, pf_map** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new pf_map{classify_spec(parse_map_spec(text))};
    return PF_OK;
  });
}

pf_status pf_map_from_file(const char* path, pf_map** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pf_map{classify_spec(read_map_spec(path))};
    return PF_OK;
  });
}

void pf_map_free(pf_map* map) { delete map; }

pf_status pf_map_to_json(const pf_map* map, char** out) {
  return guarded([&] {
    require(map, "map");
    require(out, "out");
    *out = copy_string(write_map_spec(map->cl.spec));
    return PF_OK;
  });
}

pf_status pf_classify(const pf_map* map, char** out_json) {
  return guarded([&] {
    require(map, "map");
    require(out_json, "out_json");
    *out_json = copy_string(classification_json(map->cl.rm, map->cl.reports));
    return PF_OK;
  });
}

pf_status pf_approx(const pf_map* map, const pf_options* opts, char** out_json) {
  return guarded([&] {
    require(map, "map");
    require(out_json, "out_json");
    const Approximation ap = approximate_spec(map->cl, convert(opts));
    *out_json = copy_string(parameterization_json(ap.par, &ap.residual));
    return PF_OK;
  });
}

pf_status pf_residual(const pf_map* map, const pf_options* opts, double rho, int n_samples,
                      char** out_json) {
  return guarded([&] {
    require(map, "map");
    require(out_json, "out_json");
    if (n_samples < 0) fail(ErrorKind::Argument, "n_samples must be nonnegative");
    const Approximation ap = approximate_spec(map->cl, convert(opts));
    if (!(rho > 0.0)) rho = select_rho(InnerDynamics(ap.par.R, ap.par.N));
    const auto ts = log_samples(rho, n_samples);
    const ResidualReport rep = residual_report(map->cl.rm, ap.par, ts);
    *out_json = copy_string(residual_json(ap.par, rep));
    return PF_OK;
  });
}

pf_status pf_refine(const pf_map* map, const pf_options* opts, pf_sweep_callback cb, void* user,
                    pf_curve** out) {
  return guarded([&] {
    require(map, "map");
    require(out, "out");
    std::function<void(const SweepRecord&)> on_sweep;
    if (cb) on_sweep = [cb, user](const SweepRecord& r) { cb(r.sweep, r.sup_change, r.residual_sup, user); };
    *out = new pf_curve{refine_spec(map->cl, convert(opts), on_sweep)};
    return PF_OK;
  });
}

void pf_curve_free(pf_curve* curve) { delete curve; }

double pf_curve_rho(const pf_curve* curve) { return curve ? curve->curve->rho() : 0.0; }

pf_status pf_curve_state(const pf_curve* curve, char** out_json) {
  return guarded([&] {
    require(curve, "curve");
    require(out_json, "out_json");
    *out_json = copy_string(refine_json(curve->curve->par(), curve->curve->state()));
    return PF_OK;
  });
}

pf_status pf_curve_eval(const pf_curve* curve, double t, double* x, double* y, double* res_x,
                        double* res_y) {
  return guarded([&] {
    require(curve, "curve");
    require(x, "x");
    require(y, "y");
    const Point p = curve->curve->eval(t).p;
    *x = p.x;
    *y = p.y;
    if (res_x || res_y) {
      const Point r = curve->curve->residual(t);
      if (res_x) *res_x = r.x;
      if (res_y) *res_y = r.y;
    }
    return PF_OK;
  });
}

pf_status pf_curve_samples(const pf_curve* curve, double tmax, int samples, const char* format,
                           char** out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    const std::string fmt = format ? format : "csv";
    if (fmt != "csv" && fmt != "json") fail(ErrorKind::Argument, "format must be csv or json");
    const CurveSamples cs = sample_curve(*curve->curve, curve_parameters(tmax, samples));
    *out = copy_string(fmt == "csv" ? curve_csv(cs.rows) : curve_json(cs.rows, cs.error));
    if (cs.error) {
      g_last_error = *cs.error;
      return PF_ERR_NUMERIC;
    }
    return PF_OK;
  });
}

}  // extern "C"
