#pragma once

// File formats: map specs and parameterizations as JSON, reports as JSON,
// curve samples as CSV. Doubles are written in shortest round-trip form, so
// reading back what was written reproduces every coefficient exactly.

#include <optional>
#include <string>
#include <vector>

#include "paramfold/approx.hpp"
#include "paramfold/model.hpp"
#include "paramfold/refine.hpp"

namespace paramfold {

// { "name": str, "c": float, "degree": int,
//   "f1": [{"i": int, "j": int, "v": float}, ...], "f2": [...] }
// Syntax errors report line and column, content errors the field path.
// Both throw ErrorKind::Input.
PlanarMapSpec parse_map_spec(const std::string& text);
PlanarMapSpec read_map_spec(const std::string& path);
// Monomials in graded lexicographic order, zeros omitted.
std::string write_map_spec(const PlanarMapSpec& spec);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// ReducedMap plus hypothesis reports, with the case, k and a_k repeated at
// the top level.
std::string classification_json(const ReducedMap& rm, const std::vector<HypothesisReport>& reports);

// Parameterization, with the residual orders when a report is given.
std::string parameterization_json(const Parameterization& par,
                                  const ResidualReport* residual = nullptr);
// Inverse of parameterization_json (residual fields are ignored).
Parameterization parse_parameterization(const std::string& text);

std::string residual_json(const Parameterization& par, const ResidualReport& report);

std::string refine_json(const Parameterization& par, const RefineState& state);

struct CurveRow {
  double t;
  Point p;
  Point residual;
};

// Header t,x,y,res_x,res_y; values printed with %.17g.
std::string curve_csv(const std::vector<CurveRow>& rows);
std::string curve_json(const std::vector<CurveRow>& rows, const std::optional<std::string>& error);

}  // namespace paramfold
