#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "paramfold/jets.hpp"
#include "paramfold/model.hpp"

namespace testing {

inline std::string data_path(const std::string& name) {
  return std::string(PARAMFOLD_TEST_DATA) + "/" + name;
}

// Largest coefficient difference relative to max(1, largest magnitude).
inline double rel_diff(const paramfold::Jet1& a, const paramfold::Jet1& b) {
  double d = 0.0, s = 1.0;
  for (int i = 0; i <= std::max(a.degree(), b.degree()); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    s = std::max({s, std::abs(a[i]), std::abs(b[i])});
  }
  return d / s;
}

inline double rel_diff(const paramfold::Jet2& a, const paramfold::Jet2& b) {
  double d = 0.0, s = 1.0;
  const int deg = std::max(a.degree(), b.degree());
  for (int e = 0; e <= deg; ++e) {
    for (int j = 0; j <= e; ++j) {
      d = std::max(d, std::abs(a(e - j, j) - b(e - j, j)));
      s = std::max({s, std::abs(a(e - j, j)), std::abs(b(e - j, j))});
    }
  }
  return d / s;
}

inline double max_abs(const paramfold::Jet2& a) {
  double s = 0.0;
  for (int e = 0; e <= a.degree(); ++e)
    for (int j = 0; j <= e; ++j) s = std::max(s, std::abs(a(e - j, j)));
  return s;
}

// Random jets with coefficients in [-1, 1]; `from` zeroes the low orders.
inline paramfold::Jet1 random_jet1(std::mt19937_64& rng, int degree, int from = 0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  paramfold::Jet1 j(degree);
  for (int i = from; i <= degree; ++i) j.at(i) = u(rng);
  return j;
}

inline paramfold::Jet2 random_jet2(std::mt19937_64& rng, int degree, int from = 0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  paramfold::Jet2 j(degree);
  for (int e = from; e <= degree; ++e) {
    for (int k = 0; k <= e; ++k) j.at(e - k, k) = u(rng);
  }
  return j;
}

}  // namespace testing
