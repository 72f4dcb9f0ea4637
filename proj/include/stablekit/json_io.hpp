#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "stablekit/dense.hpp"
#include "stablekit/multiaffine.hpp"

namespace stablekit {

using PolyVariant = std::variant<MultiAffinePoly, DensePoly>;

// Polynomial interchange format:
//   {"arity": m, "kind": "multiaffine"|"dense",
//    "terms": [{"exp": [e1..em], "re": r, "im": i}, ...]}
// Omitted terms are zero; the dense box is the componentwise max of the
// exponents present.

inline nlohmann::json poly_to_json(const MultiAffinePoly& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (std::uint32_t s : f.support(0.0)) {
    nlohmann::json t;
    std::vector<int> exp(f.arity());
    for (int v = 0; v < f.arity(); ++v) exp[v] = (s >> v) & 1;
    t["exp"] = exp;
    t["re"] = f.coeff(s).real();
    t["im"] = f.coeff(s).imag();
    terms.push_back(t);
  }
  return {{"arity", f.arity()}, {"kind", "multiaffine"}, {"terms", terms}};
}

inline nlohmann::json poly_to_json(const DensePoly& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& exp : f.support(0.0)) {
    nlohmann::json t;
    t["exp"] = exp;
    t["re"] = f.coeff(exp).real();
    t["im"] = f.coeff(exp).imag();
    terms.push_back(t);
  }
  return {{"arity", f.arity()}, {"kind", "dense"}, {"terms", terms}};
}

inline nlohmann::json poly_to_json(const PolyVariant& f) {
  return std::visit([](const auto& p) { return poly_to_json(p); }, f);
}

inline PolyVariant poly_from_json(const nlohmann::json& j) {
  require(j.contains("arity") && j.contains("kind"), "poly json: missing arity/kind");
  int m = j.at("arity").get<int>();
  std::string kind = j.at("kind").get<std::string>();
  std::vector<std::pair<std::vector<int>, Scalar>> terms;
  if (j.contains("terms")) {
    for (const auto& t : j.at("terms")) {
      std::vector<int> exp = t.at("exp").get<std::vector<int>>();
      require(static_cast<int>(exp.size()) == m, "poly json: exponent arity mismatch");
      double re = t.value("re", 0.0), im = t.value("im", 0.0);
      terms.push_back({exp, Scalar(re, im)});
    }
  }
  if (kind == "multiaffine") {
    MultiAffinePoly f(m);
    for (const auto& [exp, c] : terms) {
      std::uint32_t s = 0;
      for (int v = 0; v < m; ++v) {
        require(exp[v] == 0 || exp[v] == 1, "poly json: multiaffine exponent above 1");
        if (exp[v]) s |= std::uint32_t(1) << v;
      }
      f.set(s, f.coeff(s) + c);
    }
    return f;
  }
  if (kind == "dense") {
    std::vector<int> kappa(m, 0);
    for (const auto& [exp, c] : terms)
      for (int v = 0; v < m; ++v) kappa[v] = std::max(kappa[v], exp[v]);
    DensePoly f(m, kappa);
    for (const auto& [exp, c] : terms) f.set(exp, f.coeff(exp) + c);
    return f;
  }
  throw std::invalid_argument("poly json: unknown kind");
}

inline DensePoly as_dense(const PolyVariant& f) {
  if (std::holds_alternative<DensePoly>(f)) return std::get<DensePoly>(f);
  return std::get<MultiAffinePoly>(f).to_dense();
}

inline MultiAffinePoly as_multiaffine(const PolyVariant& f) {
  if (std::holds_alternative<MultiAffinePoly>(f)) return std::get<MultiAffinePoly>(f);
  return MultiAffinePoly::from_dense(std::get<DensePoly>(f));
}

// Matrix interchange: {"n": n, "re": [[..]], "im": [[..]]}; "im" optional.
inline nlohmann::json matrix_to_json(const std::vector<std::vector<Scalar>>& a) {
  int n = static_cast<int>(a.size());
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
    for (int k = 0; k < n; ++k) {
      rrow.push_back(a[i][k].real());
      irow.push_back(a[i][k].imag());
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  return {{"n", n}, {"re", re}, {"im", im}};
}

inline std::vector<std::vector<Scalar>> matrix_from_json(const nlohmann::json& j) {
  require(j.contains("n") && j.contains("re"), "matrix json: missing n/re");
  int n = j.at("n").get<int>();
  std::vector<std::vector<Scalar>> a(n, std::vector<Scalar>(n, Scalar(0)));
  const auto& re = j.at("re");
  require(static_cast<int>(re.size()) == n, "matrix json: row count");
  for (int i = 0; i < n; ++i) {
    require(static_cast<int>(re[i].size()) == n, "matrix json: column count");
    for (int k = 0; k < n; ++k) a[i][k] = Scalar(re[i][k].get<double>(), 0.0);
  }
  if (j.contains("im")) {
    const auto& im = j.at("im");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) a[i][k] += Scalar(0.0, im[i][k].get<double>());
  }
  return a;
}

// Plain comma-separated rows, one line per row.
inline std::vector<std::vector<double>> matrix_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  for (const auto& r : rows)
    require(r.size() == rows[0].size(), "csv: ragged rows");
  return rows;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open input file");
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace stablekit
