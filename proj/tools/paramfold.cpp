// paramfold command-line front end. Talks to the library only through the
// C API in paramfold.h.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "paramfold/paramfold.h"

namespace {

enum Exit { kOk = 0, kInput = 1, kHypothesis = 2, kNumeric = 3 };

struct Flags {
  std::string in;
  std::string out;
  std::string format;
  std::string branch = "stable";
  std::string family = "primary";
  int order = 10;
  double rho = 0.0;
  double tol = 1e-13;
  double tmax = 0.0;
  int samples = 0;
  int m = 32;
  double tie_break = 0.0;
  bool gamma = false;
  std::string dump_dir;
};

// Owns a string handed out by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { pf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct MapHandle {
  pf_map* p = nullptr;
  ~MapHandle() { pf_map_free(p); }
};

struct CurveHandle {
  pf_curve* p = nullptr;
  ~CurveHandle() { pf_curve_free(p); }
};

int exit_code(pf_status s) {
  switch (s) {
    case PF_OK: return kOk;
    case PF_ERR_HYPOTHESIS: return kHypothesis;
    case PF_ERR_NUMERIC: return kNumeric;
    default: return kInput;
  }
}

// Reports a failed call. Hypothesis failures also print the map's report.
int report(pf_status s, const MapHandle* map) {
  std::cerr << "paramfold: " << pf_last_error() << "\n";
  if (s == PF_ERR_HYPOTHESIS && map && map->p) {
    LibString js;
    if (pf_classify(map->p, &js.p) == PF_OK) std::cerr << js.str();
  }
  return exit_code(s);
}

bool write_output(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream os(f.out, std::ios::binary);
  os << text;
  if (!os) {
    std::cerr << "paramfold: cannot write " << f.out << "\n";
    return false;
  }
  return true;
}

bool dump(const Flags& f, const std::string& name, const std::string& text) {
  if (f.dump_dir.empty()) return true;
  std::error_code ec;
  std::filesystem::create_directories(f.dump_dir, ec);
  std::ofstream os(std::filesystem::path(f.dump_dir) / name, std::ios::binary);
  os << text;
  if (!os) {
    std::cerr << "paramfold: cannot write " << f.dump_dir << "/" << name << "\n";
    return false;
  }
  return true;
}

pf_options options(const Flags& f) {
  pf_options o;
  pf_options_default(&o);
  o.branch = f.branch == "unstable" ? PF_UNSTABLE : PF_STABLE;
  o.family = f.family == "secondary" ? PF_SECONDARY : PF_PRIMARY;
  o.order = f.order;
  o.rho = f.rho;
  o.tol = f.tol;
  o.m = f.m;
  o.tie_break_x = f.tie_break;
  o.use_gamma = f.gamma ? 1 : 0;
  return o;
}

void print_sweep(int sweep, double change, double residual, void*) {
  char line[96];
  std::snprintf(line, sizeof line, "%6d  %12.4e  %12.4e\n", sweep, change, residual);
  std::cerr << line;
}

pf_status refine(const MapHandle& map, const Flags& f, CurveHandle& curve) {
  std::cerr << " sweep    sup_change  residual_sup\n";
  const pf_options o = options(f);
  return pf_refine(map.p, &o, print_sweep, nullptr, &curve.p);
}

int curve_output(const MapHandle& map, const Flags& f, const CurveHandle& curve, double tmax) {
  LibString out;
  const pf_status s = pf_curve_samples(curve.p, tmax, f.samples, f.format.c_str(), &out.p);
  if (out.p && !write_output(f, out.str())) return kInput;
  if (s != PF_OK) {
    if (s == PF_ERR_NUMERIC) std::cerr << "paramfold: warning: curve output truncated\n";
    return report(s, &map);
  }
  return kOk;
}

int run(const std::string& cmd, const Flags& f) {
  MapHandle map;
  if (const pf_status s = pf_map_from_file(f.in.c_str(), &map.p); s != PF_OK) return report(s, nullptr);
  const pf_options o = options(f);

  if (cmd == "classify") {
    LibString js;
    if (const pf_status s = pf_classify(map.p, &js.p); s != PF_OK) return report(s, &map);
    if (!write_output(f, js.str())) return kInput;
    if (nlohmann::json::parse(js.str())["case"].is_null()) {
      std::cerr << "paramfold: no nonlinear normal data through the declared degree\n";
      return kHypothesis;
    }
    return kOk;
  }
  if (cmd == "approx") {
    LibString js;
    if (const pf_status s = pf_approx(map.p, &o, &js.p); s != PF_OK) return report(s, &map);
    return write_output(f, js.str()) ? kOk : kInput;
  }
  if (cmd == "residual") {
    LibString js;
    const int n = f.samples > 0 ? f.samples : 20;
    if (const pf_status s = pf_residual(map.p, &o, f.rho, n, &js.p); s != PF_OK) return report(s, &map);
    return write_output(f, js.str()) ? kOk : kInput;
  }

  if (cmd == "full") {
    LibString cls, apx, res;
    pf_status s = pf_classify(map.p, &cls.p);
    if (s != PF_OK) return report(s, &map);
    if (!dump(f, "classify.json", cls.str())) return kInput;
    if ((s = pf_approx(map.p, &o, &apx.p)) != PF_OK) return report(s, &map);
    if (!dump(f, "approx.json", apx.str())) return kInput;
    if ((s = pf_residual(map.p, &o, f.rho, 20, &res.p)) != PF_OK) return report(s, &map);
    if (!dump(f, "residual.json", res.str())) return kInput;
  }

  CurveHandle curve;
  if (const pf_status s = refine(map, f, curve); s != PF_OK) return report(s, &map);
  const double rho = pf_curve_rho(curve.p);
  if (cmd == "full" || !f.dump_dir.empty()) {
    LibString st;
    if (const pf_status s = pf_curve_state(curve.p, &st.p); s != PF_OK) return report(s, &map);
    if (!dump(f, "refine.json", st.str())) return kInput;
  }
  if (cmd == "refine" && f.format == "json") {
    LibString st;
    if (const pf_status s = pf_curve_state(curve.p, &st.p); s != PF_OK) return report(s, &map);
    return write_output(f, st.str()) ? kOk : kInput;
  }
  double tmax = f.tmax > 0.0 ? f.tmax : rho;
  if (cmd == "refine" && tmax > rho) {
    std::cerr << "paramfold: refine samples the local curve; --tmax capped at rho = " << rho << "\n";
    tmax = rho;
  }
  return curve_output(map, f, curve, tmax);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant curves of planar maps at a parabolic fixed point"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pf_version()));

  Flags f;
  const struct {
    const char* name;
    const char* help;
    const char* format;
  } commands[] = {
      {"classify", "Reduced form, case and hypothesis report", "json"},
      {"approx", "Polynomial approximation (K_n, R_n)", "json"},
      {"residual", "Residual jets of the order-n approximation", "json"},
      {"refine", "Picard refinement on (0, rho]", "json"},
      {"globalize", "Refined curve globalized up to --tmax", "csv"},
      {"full", "classify, approx, residual, refine and globalize", "csv"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--in", f.in, "Map spec (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output file (default: stdout)");
    sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--branch", f.branch, "stable or unstable")
        ->check(CLI::IsMember({"stable", "unstable"}));
    sub->add_option("--family", f.family, "primary or secondary (case 3)")
        ->check(CLI::IsMember({"primary", "secondary"}));
    sub->add_option("--order", f.order, "Approximation order n")->check(CLI::Range(1, 200));
    sub->add_option("--rho", f.rho, "Local interval (default: automatic)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", f.tol, "Picard tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tmax", f.tmax, "Largest curve parameter")->check(CLI::PositiveNumber);
    sub->add_option("--samples", f.samples, "Number of samples")->check(CLI::Range(0, 100000));
    sub->add_option("--nodes", f.m, "Chebyshev nodes")->check(CLI::Range(4, 512));
    sub->add_option("--tie-break", f.tie_break, "K^x coefficient chosen at the singular step");
    sub->add_flag("--gamma", f.gamma, "Refine the rescaled map");
    sub->add_option("--dump-dir", f.dump_dir, "Directory for intermediate JSON artifacts");
    sub->callback([&f, c] {
      if (f.format.empty()) f.format = c.format;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInput;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  if ((cmd == "classify" || cmd == "approx" || cmd == "residual") && f.format != "json") {
    std::cerr << "paramfold: " << cmd << " writes JSON only\n";
    return kInput;
  }
  return run(cmd, f);
}
