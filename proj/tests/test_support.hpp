#pragma once

// Reference computations for the tests. Everything here is written from the
// definitions with ordered maps and plain loops, and shares no code with the
// library beyond its data types.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "rstknn/core.hpp"

namespace ref {

using Weights = std::map<std::string, double>;

inline Weights weights(const rstknn::TermVector& v) {
  Weights w;
  for (const auto& [t, x] : v.terms()) w[t] = x;
  return w;
}

inline double ej(const Weights& u, const Weights& v) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (const auto& [t, x] : u) {
    uu += x * x;
    auto it = v.find(t);
    if (it != v.end()) uv += x * it->second;
  }
  for (const auto& [t, x] : v) vv += x * x;
  const double den = uu + vv - uv;
  return den > 0.0 ? uv / den : 0.0;
}

inline double ej(const rstknn::TermVector& u, const rstknn::TermVector& v) {
  return ej(weights(u), weights(v));
}

inline double dist(const rstknn::Point& a, const rstknn::Point& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
}

struct Stats {
  double phi_s = 0, psi_s = 0, phi_t = 0, psi_t = 0;
};

inline Stats stats(const std::vector<rstknn::STObject>& objs) {
  Stats s;
  if (objs.size() < 2) return s;
  s.phi_s = s.phi_t = std::numeric_limits<double>::infinity();
  s.psi_s = s.psi_t = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      const double d = dist(objs[i].loc, objs[j].loc);
      const double t = ej(objs[i].vct, objs[j].vct);
      s.phi_s = std::min(s.phi_s, d);
      s.psi_s = std::max(s.psi_s, d);
      s.phi_t = std::min(s.phi_t, t);
      s.psi_t = std::max(s.psi_t, t);
    }
  }
  return s;
}

// Normalized score; a collapsed range counts as 1.
inline double sim(double d, double t, double alpha, const Stats& s) {
  const double sp = s.psi_s > s.phi_s ? 1.0 - (d - s.phi_s) / (s.psi_s - s.phi_s) : 1.0;
  const double tx = s.psi_t > s.phi_t ? (t - s.phi_t) / (s.psi_t - s.phi_t) : 1.0;
  return alpha * sp + (1.0 - alpha) * tx;
}

inline double sim(const rstknn::Point& a, const rstknn::TermVector& av, const rstknn::Point& b,
                  const rstknn::TermVector& bv, double alpha, const Stats& s) {
  return sim(dist(a, b), ej(av, bv), alpha, s);
}

// Objects that rank Q strictly above their k-th most similar other object.
inline std::vector<std::string> rknn(const std::vector<rstknn::STObject>& objs,
                                     const rstknn::QueryObject& q, int k, double alpha) {
  const Stats s = stats(objs);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < objs.size(); ++j) {
      if (j != i) row.push_back(sim(objs[i].loc, objs[i].vct, objs[j].loc, objs[j].vct, alpha, s));
    }
    std::sort(row.rbegin(), row.rend());
    const double kth = static_cast<int>(row.size()) >= k ? row[k - 1]
                                                         : -std::numeric_limits<double>::infinity();
    if (sim(objs[i].loc, objs[i].vct, q.loc, q.vct, alpha, s) > kth) out.push_back(objs[i].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RSTKNN_FIXTURE_DIR) / name;
}

}  // namespace ref
