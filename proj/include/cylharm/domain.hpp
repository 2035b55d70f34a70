#pragma once

// Ellipsoidal cylinders {Σ_{j<n} x_j²/a_j² < 1} and ellipsoids {Σ_{j≤n} x_j²/a_j² < 1}.

#include "cylharm/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylharm {

enum class DomainKind { cylinder, ellipsoid };

class InvalidDomain : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DomainSpec {
  DomainKind kind = DomainKind::cylinder;
  std::size_t dim = 3;
  std::vector<Rational> axes_squared;  // a_j², length n-1 (cylinder) or n (ellipsoid)

  static DomainSpec cylinder(std::size_t n, std::vector<Rational> axes2) {
    DomainSpec d{DomainKind::cylinder, n, std::move(axes2)};
    d.validate();
    return d;
  }

  static DomainSpec ellipsoid(std::size_t n, std::vector<Rational> axes2) {
    DomainSpec d{DomainKind::ellipsoid, n, std::move(axes2)};
    d.validate();
    return d;
  }

  /// Unit circular cylinder in R^n.
  static DomainSpec unit_cylinder(std::size_t n) { return cylinder(n, std::vector<Rational>(n - 1, Rational(1))); }

  std::size_t constrained_vars() const { return kind == DomainKind::cylinder ? dim - 1 : dim; }

  void validate() const {
    if (dim < 2) throw InvalidDomain("domain dimension must be at least 2");
    if (axes_squared.size() != constrained_vars())
      throw InvalidDomain("expected " + std::to_string(constrained_vars()) + " squared semi-axes, got " +
                          std::to_string(axes_squared.size()));
    for (const auto& a2 : axes_squared)
      if (a2 <= 0) throw InvalidDomain("squared semi-axes must be positive");
  }

  /// A = max_j a_j.
  double max_semi_axis() const {
    double best = 0.0;
    for (const auto& a2 : axes_squared) best = std::max(best, std::sqrt(to_double(a2)));
    return best;
  }

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Parses `cylinder:n=<n>:axes2=<r1>,<r2>,...` or `ellipsoid:n=<n>:axes2=...`.
inline DomainSpec parse_domain(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw InvalidDomain("domain spec must look like 'cylinder:n=3:axes2=1,1', got '" + text + "'");
  DomainSpec d;
  if (parts[0] == "cylinder") d.kind = DomainKind::cylinder;
  else if (parts[0] == "ellipsoid") d.kind = DomainKind::ellipsoid;
  else throw InvalidDomain("unknown domain kind '" + parts[0] + "'");
  if (parts[1].rfind("n=", 0) != 0) throw InvalidDomain("expected 'n=<dim>' in domain spec");
  try {
    std::size_t used = 0;
    const int n = std::stoi(parts[1].substr(2), &used);
    if (used != parts[1].size() - 2 || n < 2) throw std::invalid_argument("");
    d.dim = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw InvalidDomain("invalid dimension in '" + parts[1] + "'");
  }
  if (parts[2].rfind("axes2=", 0) != 0) throw InvalidDomain("expected 'axes2=<list>' in domain spec");
  std::stringstream axes(parts[2].substr(6));
  for (std::string item; std::getline(axes, item, ',');) {
    auto r = parse_rational(item);
    if (!r) throw InvalidDomain("malformed squared semi-axis '" + item + "'");
    d.axes_squared.push_back(*r);
  }
  d.validate();
  return d;
}

inline std::string format_domain(const DomainSpec& d) {
  std::string out = d.kind == DomainKind::cylinder ? "cylinder" : "ellipsoid";
  out += ":n=" + std::to_string(d.dim) + ":axes2=";
  for (std::size_t i = 0; i < d.axes_squared.size(); ++i) out += (i ? "," : "") + to_string(d.axes_squared[i]);
  return out;
}

/// p₂ = Σ x_j²/a_j² (the leading homogeneous part of the defining polynomial).
inline Polynomial leading_quadratic(const DomainSpec& d) {
  Polynomial p(d.dim);
  for (std::size_t j = 0; j < d.constrained_vars(); ++j) {
    MultiIndex alpha(d.dim, 0);
    alpha[j] = 2;
    p.add_term(std::move(alpha), 1 / d.axes_squared[j]);
  }
  return p;
}

/// p = Σ x_j²/a_j² − 1; Γ = {p = 0}.
inline Polynomial defining_polynomial(const DomainSpec& d) {
  d.validate();
  return leading_quadratic(d) - Polynomial::constant(d.dim, Rational(1));
}

}  // namespace cylharm
