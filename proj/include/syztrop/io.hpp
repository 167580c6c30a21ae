#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "syztrop/mirror.hpp"
#include "syztrop/toric.hpp"

namespace syztrop {

using Json = nlohmann::json;

// 17 significant digits: lossless double round trip.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string to_string(const Complex& c) {
  if (c.imag() == 0.0) return fmt17(c.real());
  std::string s = "(" + fmt17(c.real());
  s += c.imag() < 0 ? "-" : "+";
  s += fmt17(std::abs(c.imag())) + "i)";
  return s;
}

// Text literal: terms joined by " + ", each "coeff*T^exponent" with the
// exponent braced when it is a true fraction, e.g.
//   1*T^0 + (-0.5+0.86602540378443871i)*T^{1/3}
inline std::string to_string(const Novikov& x) {
  if (x.is_zero()) return "0";
  std::string s;
  for (const auto& t : x.terms()) {
    if (!s.empty()) s += " + ";
    s += to_string(t.coeff) + "*T^";
    if (t.exp.get_den() == 1)
      s += to_string(t.exp);
    else
      s += "{" + to_string(t.exp) + "}";
  }
  return s;
}

namespace detail {

inline std::string strip(std::string_view sv) {
  const auto a = sv.find_first_not_of(" \t");
  if (a == std::string_view::npos) return "";
  const auto b = sv.find_last_not_of(" \t");
  return std::string(sv.substr(a, b - a + 1));
}

inline Complex parse_complex(const std::string& raw) {
  std::string s = strip(raw);
  if (s.empty()) throw DomainError("empty coefficient");
  if (s.front() != '(') return Complex(std::stod(s), 0.0);
  if (s.back() != ')') throw DomainError("unbalanced coefficient parens: " + raw);
  s = s.substr(1, s.size() - 2);
  // split before the imaginary part at a sign that is not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t i = 1; i < s.size(); ++i)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
  if (split == std::string::npos || s.back() != 'i')
    throw DomainError("malformed complex literal: " + raw);
  const double re = std::stod(s.substr(0, split));
  std::string im = s.substr(split, s.size() - split - 1);
  if (im == "+" || im == "-") im += "1";
  return Complex(re, std::stod(im));
}

}  // namespace detail

inline Novikov parse_novikov(const std::string& text,
                             Rational precision = Rational(kDefaultPrecision)) {
  const std::string body = detail::strip(text);
  if (body == "0" || body.empty()) return Novikov::zero(precision);
  std::vector<Novikov::Term> terms;
  int depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    const std::string tok = detail::strip(body.substr(start, end - start));
    if (tok.empty()) throw DomainError("empty term in series literal");
    const auto sep = tok.find("*T^");
    if (sep == std::string::npos)
      throw DomainError("series term must look like coeff*T^exponent: " + tok);
    std::string exp = detail::strip(tok.substr(sep + 3));
    if (!exp.empty() && exp.front() == '{') {
      if (exp.back() != '}') throw DomainError("unbalanced exponent braces: " + tok);
      exp = exp.substr(1, exp.size() - 2);
    }
    terms.push_back({parse_rational(exp), detail::parse_complex(tok.substr(0, sep))});
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '(') ++depth;
    if (body[i] == ')') --depth;
    if (body[i] == '+' && depth == 0 && i > 0 &&
        (body[i - 1] == ' ' || body[i - 1] == '}' || std::isdigit(body[i - 1]))) {
      // a separator only between terms, never inside a number
      const std::string ahead = detail::strip(body.substr(i + 1));
      if (!ahead.empty()) {
        flush(i);
        start = i + 1;
      }
    }
  }
  flush(body.size());
  return Novikov::from_terms(std::move(terms), std::move(precision));
}

// {"terms": [{"c": "p/q", "e": [int,...]}, ...]}
inline Json to_json(const Tropical& h) {
  Json terms = Json::array();
  for (const auto& t : h.terms()) {
    Json term;
    term["c"] = to_string(t.constant);
    term["e"] = t.exps;
    terms.push_back(std::move(term));
  }
  return Json{{"terms", std::move(terms)}};
}

inline Tropical tropical_from_json(const Json& j) {
  std::vector<Tropical::Term> terms;
  int nvars = -1;
  for (const auto& term : j.at("terms")) {
    Tropical::Term t;
    t.constant = parse_rational(term.at("c").get<std::string>());
    t.exps = term.at("e").get<ExpVec>();
    if (nvars < 0) nvars = static_cast<int>(t.exps.size());
    terms.push_back(std::move(t));
  }
  if (nvars < 0) throw DomainError("tropical polynomial needs at least one term");
  return Tropical(nvars, std::move(terms));
}

// {"n": vars, "terms": [{"coeff": "<series literal>", "e": [int,...]}, ...]}
inline Json to_json(const LaurentPoly& h) {
  Json terms = Json::array();
  for (const auto& [e, c] : h.terms()) {
    Json term;
    term["coeff"] = to_string(c);
    term["e"] = e;
    terms.push_back(std::move(term));
  }
  return Json{{"n", h.nvars()}, {"terms", std::move(terms)}};
}

inline LaurentPoly laurent_from_json(const Json& j,
                                     Rational precision = Rational(kDefaultPrecision)) {
  LaurentPoly h(j.at("n").get<int>());
  for (const auto& term : j.at("terms")) {
    const ExpVec e = term.at("e").get<ExpVec>();
    if (h.terms().count(e))
      throw DomainError("duplicate exponent vector in polynomial input");
    h.add_term(e, parse_novikov(term.at("coeff").get<std::string>(), precision));
  }
  return h;
}

// {"rays": [[...]], "basis_cone": [...], "lambdas": ["p/q",...],
//  "deltas": {"4": "<series literal>"}, "energies": {"H1": "p/q"}}
inline Json to_json(const ToricCY& d) {
  Json j;
  j["rays"] = d.rays;
  j["basis_cone"] = d.basis_cone;
  Json lambdas = Json::array();
  for (const auto& l : d.lambdas) lambdas.push_back(to_string(l));
  j["lambdas"] = std::move(lambdas);
  if (!d.deltas.empty()) {
    Json deltas;
    for (const auto& [idx, delta] : d.deltas) deltas[std::to_string(idx)] = to_string(delta);
    j["deltas"] = std::move(deltas);
  }
  if (!d.energies.empty()) {
    Json energies;
    for (const auto& [name, e] : d.energies) energies[name] = to_string(e);
    j["energies"] = std::move(energies);
  }
  return j;
}

inline ToricCY toric_from_json(const Json& j) {
  ToricCY d;
  d.rays = j.at("rays").get<std::vector<std::vector<long>>>();
  d.basis_cone = j.at("basis_cone").get<std::vector<int>>();
  for (const auto& l : j.at("lambdas"))
    d.lambdas.push_back(parse_rational(l.get<std::string>()));
  if (j.contains("deltas"))
    for (const auto& [key, value] : j.at("deltas").items())
      d.deltas[std::stoi(key)] = parse_novikov(value.get<std::string>());
  if (j.contains("energies"))
    for (const auto& [key, value] : j.at("energies").items())
      d.energies[key] = parse_rational(value.get<std::string>());
  return d;
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

// FNV-1a digest of input bytes, for report provenance.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json to_json(const SingularLocusReport& r) {
  return Json{{"samples", r.samples},
              {"singular_seen", r.singular_seen},
              {"smooth_seen", r.smooth_seen},
              {"misclassified", r.misclassified},
              {"seed", r.seed},
              {"passed", r.passed()}};
}

inline Json to_json(const CommutationReport& r) {
  Json j;
  j["n"] = r.n;
  j["samples_per_chamber"] = r.samples_per_chamber;
  j["seed"] = r.seed;
  j["model"] = r.model;
  j["total"] = r.total;
  j["mismatches"] = r.mismatches;
  j["branches"] = {{"1a", r.branch_counts[0]},
                   {"1b", r.branch_counts[1]},
                   {"2a", r.branch_counts[2]},
                   {"2b", r.branch_counts[3]}};
  j["forced_cancellations"] = r.forced_cancellations;
  j["all_branches_covered"] = r.all_branches_covered();
  j["passed"] = r.passed();
  if (!r.examples.empty()) {
    Json ex = Json::array();
    for (const auto& m : r.examples)
      ex.push_back({{"index", m.index}, {"chamber", to_string(m.chamber)},
                    {"detail", m.detail}});
    j["mismatch_examples"] = std::move(ex);
  }
  return j;
}

}  // namespace syztrop
