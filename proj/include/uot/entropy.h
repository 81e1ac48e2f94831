#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "uot/extended_real.h"
#include "uot/measures.h"

namespace uot {

// Which of the two input measures an atom index refers to.
enum class Side { A, B };

// Csiszar entropy function phi together with its strength parameters.
//
//   Balanced      phi = indicator of {1}
//   KL(rho)       rho (p log p - p + 1)
//   TV(rho)       rho |p - 1|
//   Range(a, b)   indicator of [a, b], 0 <= a <= 1 <= b
//   Power(rho, s) rho / (s (s - 1)) (p^s - s (p - 1) - 1), s < 1, s != 0  (s = 1/2 is Hellinger)
//   Berg(rho)     rho (p - 1 - log p)
//
// KL additionally accepts a spatially varying strength: one rho per atom of
// each input measure.
class Entropy {
 public:
  enum class Kind { Balanced, KL, TV, Range, Power, Berg };

  struct RhoField {
    Vector on_a;
    Vector on_b;
  };

  static Entropy balanced();
  static Entropy kl(double rho);
  static Entropy tv(double rho);
  static Entropy range(double a, double b);
  static Entropy power(double rho, double s);
  static Entropy hellinger(double rho) { return power(rho, 0.5); }
  static Entropy berg(double rho);
  static Entropy kl_varying(Vector rho_a, Vector rho_b);

  // "balanced", "kl:rho=1", "tv:rho=0.5", "range:a=0.7,b=1.3", "power:rho=1,s=0.5", "berg:rho=1"
  static Entropy parse(std::string_view spec);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  double rho() const { return rho_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double s() const { return s_; }
  // Conjugate exponent r = s / (s - 1); Berg is the r = 0 member of the family.
  double r() const { return kind_ == Kind::Berg ? 0.0 : s_ / (s_ - 1.0); }

  bool has_rho_field() const { return static_cast<bool>(field_); }
  const RhoField* rho_field() const { return field_.get(); }
  // Entropy acting at atom i of the given side (resolves the rho field).
  Entropy at(Side side, Index i) const;

  // phi* differentiable and phi strictly convex: KL, Power, Berg.
  bool is_smooth() const { return kind_ == Kind::KL || kind_ == Kind::Power || kind_ == Kind::Berg; }
  ExtendedReal phi_at_zero() const;

 private:
  Entropy(Kind kind, double rho, double a, double b, double s) : kind_(kind), rho_(rho), a_(a), b_(b), s_(s) {}

  Kind kind_ = Kind::Balanced;
  double rho_ = 1.0;
  double a_ = 1.0;
  double b_ = 1.0;
  double s_ = 0.5;
  std::shared_ptr<const RhoField> field_;
};

ExtendedReal phi(const Entropy& e, double p);

// Legendre conjugate sup_{p >= 0} p q - phi(p).
ExtendedReal phi_conj(const Entropy& e, double q);

// d phi*/dq for smooth entropies (Balanced included); throws Unsupported otherwise.
double phi_conj_derivative(const Entropy& e, double q);

// argmin_q eps exp((p - q) / eps) + phi*(q)
double aprox(const Entropy& e, double eps, double p);

// -aprox(-p): the pointwise dampening applied after each softmin.
double damp(const Entropy& e, double eps, double p);

enum class Feasibility { Feasible, Infeasible };

// Relative tolerance used to decide m(alpha) == m(beta) for balanced transport.
inline constexpr double kBalancedMassTolerance = 1e-12;

Feasibility feasible(const Entropy& e, double mass_a, double mass_b);

// High-temperature initialization of the potential living on `self`.
// `cost` is |self| x |other|.
Vector init_potential(const Entropy& e, double eps, const DiscreteMeasure& self, const DiscreteMeasure& other,
                      const CostMatrix& cost, Side self_side = Side::A);

}  // namespace uot
