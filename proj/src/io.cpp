#include "paramfold/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "paramfold/error.hpp"

namespace paramfold {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

[[noreturn]] void input_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::Input, field + ": " + what);
}

// Line and column of a byte offset (both 1-based).
std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_col(text, byte);
    std::string msg = e.what();
    // nlohmann prefixes "[json.exception...] parse error at line L, column C: ".
    if (const auto pos = msg.find("parse error"); pos != std::string::npos) {
      const auto colon = msg.find(": ", pos);
      msg = colon != std::string::npos ? msg.substr(colon + 2) : msg.substr(pos);
    }
    fail(ErrorKind::Input,
         "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) input_error(path + key, "missing");
  if (!it->is_number()) input_error(path + key, "expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) input_error(path + key, "not finite");
  return v;
}

int get_int(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) input_error(path + key, "missing");
  if (!it->is_number_integer()) input_error(path + key, "expected an integer");
  const auto v = it->get<long long>();
  if (v < -1000000 || v > 1000000) input_error(path + key, "out of range");
  return static_cast<int>(v);
}

Jet2 parse_monomials(const json& doc, const std::string& key, int degree) {
  Jet2 f(degree);
  const auto it = doc.find(key);
  if (it == doc.end()) return f;
  if (!it->is_array()) input_error(key, "expected an array of {i, j, v}");
  for (std::size_t idx = 0; idx < it->size(); ++idx) {
    const std::string path = key + "[" + std::to_string(idx) + "].";
    const json& m = (*it)[idx];
    if (!m.is_object()) input_error(key + "[" + std::to_string(idx) + "]", "expected an object");
    for (const auto& [name, _] : m.items()) {
      if (name != "i" && name != "j" && name != "v") input_error(path + name, "unknown field");
    }
    const int i = get_int(m, "i", path);
    const int j = get_int(m, "j", path);
    const double v = get_number(m, "v", path);
    if (i < 0 || j < 0) input_error(path + "i", "negative exponent");
    if (i + j < 2) input_error(path + "i", "constant and linear monomials are not allowed (i + j < 2)");
    if (i + j > degree) input_error(path + "i", "monomial above the declared degree " + std::to_string(degree));
    f.at(i, j) += v;
  }
  return f;
}

ordered monomials_json(const Jet2& f) {
  ordered out = ordered::array();
  for (int d = 0; d <= f.degree(); ++d) {
    for (int j = 0; j <= d; ++j) {
      const double v = f(d - j, j);
      if (v != 0.0) out.push_back({{"i", d - j}, {"j", j}, {"v", v}});
    }
  }
  return out;
}

ordered coeffs_json(const Jet1& f, int from = 0) {
  ordered out = ordered::array();
  for (int i = from; i <= f.degree(); ++i) out.push_back(f[i]);
  return out;
}

ordered optional_int(const std::optional<int>& v) { return v ? ordered(*v) : ordered(nullptr); }

ordered checks_json(const std::vector<HypothesisCheck>& checks) {
  ordered out = ordered::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return out;
}

ordered report_json(const HypothesisReport& r) {
  ordered out;
  out["branch"] = to_string(r.branch);
  out["case"] = static_cast<int>(r.tag);
  out["analytic_ok"] = r.analytic_ok();
  out["smooth_ok"] = r.smooth_ok();
  out["analytic"] = checks_json(r.analytic);
  out["smooth"] = checks_json(r.smooth);
  out["beta"] = r.beta ? ordered(*r.beta) : ordered(nullptr);
  out["formal_window"] = r.formal_window ? ordered(*r.formal_window) : ordered(nullptr);
  out["exceptional_constant"] = r.exceptional_constant;
  return out;
}

ordered conj_json(const Conjugation& conj) {
  ordered out = ordered::array();
  for (const auto& s : conj.steps()) {
    switch (s.kind) {
      case ConjugationStep::Kind::SignFlip:
        out.push_back({{"kind", "sign_flip"}});
        break;
      case ConjugationStep::Kind::Shear:
        out.push_back({{"kind", "shear"}, {"h", monomials_json(s.shear)}});
        break;
      case ConjugationStep::Kind::Scale:
        out.push_back({{"kind", "scale"}, {"gamma", s.gamma}});
        break;
    }
  }
  return out;
}

const char* family_name(Family f) { return f == Family::Primary ? "primary" : "secondary"; }

ordered parameterization_doc(const Parameterization& par) {
  ordered out;
  out["case"] = static_cast<int>(par.tag);
  out["branch"] = to_string(par.branch);
  out["family"] = family_name(par.family);
  out["n"] = par.n;
  out["N"] = par.N;
  out["Kx_base"] = par.kx_base;
  out["Ky_base"] = par.ky_base;
  out["Kx"] = coeffs_json(par.Kx, par.kx_base);
  out["Ky"] = coeffs_json(par.Ky, par.ky_base);
  out["R_N"] = par.R_N();
  out["R_2Nm1"] = par.R_2Nm1();
  out["x_offset"] = par.x_offset;
  out["y_offset"] = par.y_offset;
  return out;
}

std::string dump(const ordered& doc) { return doc.dump(2) + "\n"; }

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Input, path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Argument, path + ": cannot write");
  out << text;
  if (!out) fail(ErrorKind::Argument, path + ": write failed");
}

PlanarMapSpec parse_map_spec(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) fail(ErrorKind::Input, "line 1: expected a JSON object");
  for (const auto& [name, _] : doc.items()) {
    if (name != "name" && name != "c" && name != "degree" && name != "f1" && name != "f2") {
      input_error(name, "unknown field");
    }
  }
  PlanarMapSpec spec;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) input_error("name", "expected a string");
    spec.name = it->get<std::string>();
  }
  spec.c = get_number(doc, "c", "");
  spec.degree = get_int(doc, "degree", "");
  if (spec.degree < 3) input_error("degree", "must be at least 3");
  if (spec.degree > 200) input_error("degree", "above the supported maximum 200");
  spec.f1 = parse_monomials(doc, "f1", spec.degree);
  spec.f2 = parse_monomials(doc, "f2", spec.degree);
  spec.validate();
  return spec;
}

PlanarMapSpec read_map_spec(const std::string& path) {
  try {
    return parse_map_spec(read_text_file(path));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Input) throw;
    fail(ErrorKind::Input, path + ": " + e.what());
  }
}

std::string write_map_spec(const PlanarMapSpec& spec) {
  ordered doc;
  doc["name"] = spec.name;
  doc["c"] = spec.c;
  doc["degree"] = spec.degree;
  doc["f1"] = monomials_json(spec.f1);
  doc["f2"] = monomials_json(spec.f2);
  return dump(doc);
}

std::string classification_json(const ReducedMap& rm, const std::vector<HypothesisReport>& reports) {
  ordered doc;
  doc["name"] = rm.name;
  doc["case"] = rm.tag ? ordered(static_cast<int>(*rm.tag)) : ordered(nullptr);
  doc["k"] = optional_int(rm.k);
  doc["a_k"] = rm.k ? ordered(rm.a_k) : ordered(nullptr);
  doc["l"] = optional_int(rm.l);
  doc["b_l"] = rm.l ? ordered(rm.b_l) : ordered(nullptr);
  doc["N"] = rm.N;
  doc["s"] = rm.s;
  ordered red;
  red["c"] = rm.c;
  red["r"] = rm.r;
  red["p"] = rm.p;
  red["q"] = rm.q;
  red["u"] = monomials_json(rm.u);
  red["polynomial_exact"] = rm.polynomial_exact;
  red["time_reversed"] = rm.time_reversed;
  red["conjugation"] = conj_json(rm.conj);
  doc["reduced"] = red;
  ordered reps = ordered::array();
  for (const auto& r : reports) reps.push_back(report_json(r));
  doc["hypotheses"] = reps;
  return dump(doc);
}

std::string parameterization_json(const Parameterization& par, const ResidualReport* residual) {
  ordered doc = parameterization_doc(par);
  if (residual) {
    doc["first_nonzero_x"] = residual->first_nonzero_x;
    doc["first_nonzero_y"] = residual->first_nonzero_y;
  }
  return dump(doc);
}

Parameterization parse_parameterization(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) fail(ErrorKind::Input, "line 1: expected a JSON object");
  Parameterization par;
  const int tag = get_int(doc, "case", "");
  if (tag < 1 || tag > 3) input_error("case", "expected 1, 2 or 3");
  par.tag = static_cast<CaseTag>(tag);
  const auto branch = doc.value("branch", std::string("stable"));
  if (branch != "stable" && branch != "unstable") input_error("branch", "expected stable or unstable");
  par.branch = branch == "stable" ? Branch::Stable : Branch::Unstable;
  const auto family = doc.value("family", std::string("primary"));
  if (family != "primary" && family != "secondary") input_error("family", "expected primary or secondary");
  par.family = family == "primary" ? Family::Primary : Family::Secondary;
  par.n = get_int(doc, "n", "");
  par.N = get_int(doc, "N", "");
  if (par.N < 2) input_error("N", "must be at least 2");
  par.kx_base = get_int(doc, "Kx_base", "");
  par.ky_base = get_int(doc, "Ky_base", "");
  if (par.kx_base < 1 || par.ky_base < 1) input_error("Kx_base", "bases must be positive");
  par.x_offset = doc.contains("x_offset") ? get_int(doc, "x_offset", "") : par.N;
  par.y_offset = doc.contains("y_offset") ? get_int(doc, "y_offset", "") : 2 * par.N - 1;
  const auto read_coeffs = [&](const char* key, int base) {
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_array()) input_error(key, "expected an array of numbers");
    std::vector<double> c(static_cast<std::size_t>(base), 0.0);
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& v = (*it)[i];
      if (!v.is_number()) input_error(std::string(key) + "[" + std::to_string(i) + "]", "expected a number");
      c.push_back(v.get<double>());
    }
    if (c.size() < 2) c.resize(2, 0.0);
    const int deg = static_cast<int>(c.size()) - 1;
    return Jet1(deg, std::move(c));
  };
  par.Kx = read_coeffs("Kx", par.kx_base);
  par.Ky = read_coeffs("Ky", par.ky_base);
  Jet1 R(2 * par.N - 1);
  R.at(1) = 1.0;
  R.at(par.N) = get_number(doc, "R_N", "");
  R.at(2 * par.N - 1) = doc.contains("R_2Nm1") ? get_number(doc, "R_2Nm1", "") : 0.0;
  par.R = R;
  return par;
}

std::string residual_json(const Parameterization& par, const ResidualReport& report) {
  ordered doc;
  doc["n"] = report.n;
  doc["N"] = par.N;
  doc["required_x"] = report.n + par.x_offset;
  doc["required_y"] = report.n + par.y_offset;
  doc["first_nonzero_x"] = report.first_nonzero_x;
  doc["first_nonzero_y"] = report.first_nonzero_y;
  doc["Gx"] = coeffs_json(report.Gx);
  doc["Gy"] = coeffs_json(report.Gy);
  ordered pts = ordered::array();
  for (const auto& s : report.pointwise) pts.push_back({{"t", s.t}, {"ex", s.ex}, {"ey", s.ey}});
  doc["pointwise"] = pts;
  return dump(doc);
}

std::string refine_json(const Parameterization& par, const RefineState& st) {
  ordered doc;
  doc["parameterization"] = parameterization_doc(par);
  doc["n"] = st.n;
  doc["N"] = st.N;
  doc["rho"] = st.rho;
  doc["alpha"] = std::isfinite(st.alpha) ? ordered(st.alpha) : ordered(nullptr);
  doc["nodes"] = st.nodes;
  doc["delta_x"] = st.delta_x;
  doc["delta_y"] = st.delta_y;
  doc["sweeps"] = st.sweep;
  doc["sup_change"] = st.sup_change;
  doc["residual_sup"] = st.residual_sup;
  doc["delta_norm"] = st.delta_norm;
  doc["noise_floor"] = st.noise_floor;
  doc["measured_contraction"] = st.measured_contraction;
  doc["contraction_bound"] = st.contraction_bound;
  doc["orbit_points"] = st.orbit_points;
  ordered hist = ordered::array();
  for (const auto& h : st.history) {
    hist.push_back({{"sweep", h.sweep}, {"sup_change", h.sup_change}, {"residual_sup", h.residual_sup}});
  }
  doc["history"] = hist;
  return dump(doc);
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "t,x,y,res_x,res_y\n";
  for (const auto& r : rows) {
    out += g17(r.t) + "," + g17(r.p.x) + "," + g17(r.p.y) + "," + g17(r.residual.x) + "," +
           g17(r.residual.y) + "\n";
  }
  return out;
}

std::string curve_json(const std::vector<CurveRow>& rows, const std::optional<std::string>& error) {
  ordered doc;
  ordered pts = ordered::array();
  for (const auto& r : rows) {
    pts.push_back({{"t", r.t}, {"x", r.p.x}, {"y", r.p.y}, {"res_x", r.residual.x}, {"res_y", r.residual.y}});
  }
  doc["points"] = pts;
  doc["error"] = error ? ordered(*error) : ordered(nullptr);
  return dump(doc);
}

}  // namespace paramfold
