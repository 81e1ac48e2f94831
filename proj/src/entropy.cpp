#include "uot/entropy.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "uot/errors.h"
#include "uot/lambert_w.h"
#include "uot/measure_io.h"

namespace uot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
}

// damp for the power family (Berg is r = 0), solved through log W so the
// argument (rho/eps) exp((p + rho(1-r)) / (eps(1-r))) is never exponentiated.
double damp_power(double rho, double r, double eps, double p) {
  const double k = 1.0 - r;
  const double log_delta = std::log(rho / eps) + (p + rho * k) / (eps * k);
  return eps * k * lambert_w_log(log_delta) - rho * k;
}

}  // namespace

Entropy Entropy::balanced() { return {Kind::Balanced, 1.0, 1.0, 1.0, 0.5}; }

Entropy Entropy::kl(double rho) {
  require_positive(rho, "rho");
  return {Kind::KL, rho, 1.0, 1.0, 0.5};
}

Entropy Entropy::tv(double rho) {
  require_positive(rho, "rho");
  return {Kind::TV, rho, 1.0, 1.0, 0.5};
}

Entropy Entropy::range(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 1.0 && std::isfinite(b))) throw DomainError("range needs 0 <= a <= 1 <= b");
  return {Kind::Range, 1.0, a, b, 0.5};
}

Entropy Entropy::power(double rho, double s) {
  require_positive(rho, "rho");
  if (!(s < 1.0) || s == 0.0 || !std::isfinite(s)) throw DomainError("power entropy needs s < 1 and s != 0");
  return {Kind::Power, rho, 1.0, 1.0, s};
}

Entropy Entropy::berg(double rho) {
  require_positive(rho, "rho");
  return {Kind::Berg, rho, 1.0, 1.0, 0.0};
}

Entropy Entropy::kl_varying(Vector rho_a, Vector rho_b) {
  for (const Vector* v : {&rho_a, &rho_b})
    for (Index i = 0; i < v->size(); ++i) require_positive((*v)[i], "rho(x)");
  Entropy e = kl(1.0);
  e.field_ = std::make_shared<const RhoField>(RhoField{std::move(rho_a), std::move(rho_b)});
  return e;
}

Entropy Entropy::at(Side side, Index i) const {
  if (!field_) return *this;
  const Vector& rho = side == Side::A ? field_->on_a : field_->on_b;
  if (i < 0 || i >= rho.size()) throw DomainError("rho field does not cover atom " + std::to_string(i));
  return kl(rho[i]);
}

ExtendedReal Entropy::phi_at_zero() const { return phi(*this, 0.0); }

Entropy Entropy::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  std::map<std::string, double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("entropy parameter without '=': " + std::string(item));
      const std::string key(item.substr(0, eq));
      const std::string_view num = item.substr(eq + 1);
      double v = 0.0;
      const auto res = std::from_chars(num.data(), num.data() + num.size(), v);
      if (res.ec != std::errc() || res.ptr != num.data() + num.size())
        throw ParseError("bad number in entropy spec: " + std::string(num));
      params[key] = v;
    }
  }
  auto take = [&](const char* key) {
    const auto it = params.find(key);
    if (it == params.end()) throw ParseError("entropy '" + name + "' needs parameter " + key);
    const double v = it->second;
    params.erase(it);
    return v;
  };
  auto finish = [&](Entropy e) {
    if (!params.empty()) throw ParseError("unknown parameter '" + params.begin()->first + "' for entropy " + name);
    return e;
  };
  try {
    if (name == "balanced") return finish(balanced());
    if (name == "kl") return finish(kl(take("rho")));
    if (name == "tv") return finish(tv(take("rho")));
    if (name == "berg") return finish(berg(take("rho")));
    if (name == "range") {
      const double a = take("a");
      return finish(range(a, take("b")));
    }
    if (name == "power") {
      const double rho = take("rho");
      return finish(power(rho, take("s")));
    }
  } catch (const DomainError& e) {
    throw ParseError(std::string("entropy '") + std::string(spec) + "': " + e.what());
  }
  throw ParseError("unknown entropy '" + name + "'");
}

std::string Entropy::to_string() const {
  switch (kind_) {
    case Kind::Balanced: return "balanced";
    case Kind::KL: return has_rho_field() ? "kl:rho=field" : "kl:rho=" + format_double(rho_);
    case Kind::TV: return "tv:rho=" + format_double(rho_);
    case Kind::Range: return "range:a=" + format_double(a_) + ",b=" + format_double(b_);
    case Kind::Power: return "power:rho=" + format_double(rho_) + ",s=" + format_double(s_);
    case Kind::Berg: return "berg:rho=" + format_double(rho_);
  }
  return "?";
}

ExtendedReal phi(const Entropy& e, double p) {
  if (p < 0.0 || std::isnan(p)) return ExtendedReal::infinity();
  const double rho = e.rho();
  switch (e.kind()) {
    case Entropy::Kind::Balanced: return p == 1.0 ? 0.0 : kInf;
    case Entropy::Kind::KL: return p == 0.0 ? rho : rho * (p * std::log(p) - p + 1.0);
    case Entropy::Kind::TV: return rho * std::abs(p - 1.0);
    case Entropy::Kind::Range: return (p >= e.a() && p <= e.b()) ? 0.0 : kInf;
    case Entropy::Kind::Berg: return p == 0.0 ? kInf : rho * (p - 1.0 - std::log(p));
    case Entropy::Kind::Power: {
      const double s = e.s();
      if (p == 0.0) return s > 0.0 ? rho / s : kInf;
      return rho / (s * (s - 1.0)) * (std::pow(p, s) - s * (p - 1.0) - 1.0);
    }
  }
  return kInf;
}

ExtendedReal phi_conj(const Entropy& e, double q) {
  const double rho = e.rho();
  switch (e.kind()) {
    case Entropy::Kind::Balanced: return q;
    case Entropy::Kind::KL: return rho * std::expm1(q / rho);
    case Entropy::Kind::TV: return q <= rho ? std::max(-rho, q) : kInf;
    case Entropy::Kind::Range: return std::max(e.a() * q, e.b() * q);
    case Entropy::Kind::Berg: return q < rho ? -rho * std::log1p(-q / rho) : kInf;
    case Entropy::Kind::Power: {
      const double r = e.r();
      const double base = 1.0 + q / (rho * (r - 1.0));
      if (base > 0.0) return rho * (r - 1.0) / r * std::expm1(r * std::log(base));
      if (base == 0.0 && r > 0.0) return rho * (1.0 - r) / r;
      return kInf;
    }
  }
  return kInf;
}

double phi_conj_derivative(const Entropy& e, double q) {
  const double rho = e.rho();
  switch (e.kind()) {
    case Entropy::Kind::Balanced: return 1.0;
    case Entropy::Kind::KL: return std::exp(q / rho);
    case Entropy::Kind::Berg:
      if (!(q < rho)) throw DomainError("phi* derivative outside its domain");
      return 1.0 / (1.0 - q / rho);
    case Entropy::Kind::Power: {
      const double r = e.r();
      const double base = 1.0 + q / (rho * (r - 1.0));
      if (!(base > 0.0)) throw DomainError("phi* derivative outside its domain");
      return std::pow(base, r - 1.0);
    }
    case Entropy::Kind::TV:
    case Entropy::Kind::Range: break;
  }
  throw Unsupported("phi* is not differentiable for " + e.to_string());
}

double damp(const Entropy& e, double eps, double p) {
  const double rho = e.rho();
  switch (e.kind()) {
    case Entropy::Kind::Balanced: return p;
    case Entropy::Kind::KL: return rho / (rho + eps) * p;
    case Entropy::Kind::TV: return std::clamp(p, -rho, rho);
    case Entropy::Kind::Range: {
      // -aprox(-p); knees at -eps log b <= 0 <= -eps log a
      if (e.a() > 0.0 && p > -eps * std::log(e.a())) return p + eps * std::log(e.a());
      if (p < -eps * std::log(e.b())) return p + eps * std::log(e.b());
      return 0.0;
    }
    case Entropy::Kind::Berg:
    case Entropy::Kind::Power: return damp_power(rho, e.r(), eps, p);
  }
  return p;
}

double aprox(const Entropy& e, double eps, double p) { return -damp(e, eps, -p); }

Feasibility feasible(const Entropy& e, double mass_a, double mass_b) {
  if (mass_a < 0.0 || mass_b < 0.0) throw DomainError("masses must be nonnegative");
  if (mass_a == 0.0 && mass_b == 0.0) return Feasibility::Feasible;
  if (mass_a == 0.0 || mass_b == 0.0)
    return e.phi_at_zero().is_infinite() ? Feasibility::Infeasible : Feasibility::Feasible;
  switch (e.kind()) {
    case Entropy::Kind::Balanced:
      return std::abs(mass_a - mass_b) <= kBalancedMassTolerance * std::max(mass_a, mass_b) ? Feasibility::Feasible
                                                                                             : Feasibility::Infeasible;
    case Entropy::Kind::Range:
      // [a ma, b ma] and [a mb, b mb] intersect
      return e.a() * std::max(mass_a, mass_b) <= e.b() * std::min(mass_a, mass_b) ? Feasibility::Feasible
                                                                                 : Feasibility::Infeasible;
    default: return Feasibility::Feasible;
  }
}

Vector init_potential(const Entropy& e, double eps, const DiscreteMeasure& self, const DiscreteMeasure& other,
                      const CostMatrix& cost, Side self_side) {
  const Index n = self.size();
  if (other.is_null()) return Vector::Zero(n);
  const double m_other = total_mass(other);

  auto centered_convolution = [&] {
    const Vector c_star = cost * other.weights();
    return Vector((c_star.array() - 0.5 * self.weights().dot(c_star)).matrix());
  };

  switch (e.kind()) {
    case Entropy::Kind::Balanced: return centered_convolution();
    case Entropy::Kind::Range: return Vector::Zero(n);
    case Entropy::Kind::KL: {
      Vector f(n);
      for (Index i = 0; i < n; ++i) f[i] = -e.at(self_side, i).rho() * std::log(m_other);
      return f;
    }
    case Entropy::Kind::TV: {
      if (m_other != 1.0) return Vector::Constant(n, m_other > 1.0 ? -e.rho() : e.rho());
      Vector f = centered_convolution();
      for (Index i = 0; i < n; ++i) f[i] = damp(e, eps, f[i]);
      return f;
    }
    case Entropy::Kind::Power:
    case Entropy::Kind::Berg: {
      const double r = e.r();
      return Vector::Constant(n, e.rho() * (1.0 - r) * (std::pow(m_other, 1.0 / (r - 1.0)) - 1.0));
    }
  }
  return Vector::Zero(n);
}

}  // namespace uot
