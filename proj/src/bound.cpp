#include "lightcone/bound.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "lightcone/errors.hpp"

namespace lightcone {

namespace {

constexpr long double kE2 = std::numbers::e_v<long double> * std::numbers::e_v<long double>;

}  // namespace

void BoundParams::validate() const {
  if (!(alpha > 2.0) || !std::isfinite(alpha))
    throw DomainError(fmt::format("alpha must exceed 2 (got {})", alpha));
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError(fmt::format("h must be positive (got {})", h));
  if (!(delta > 0.0 && delta < 2.0))
    throw DomainError(fmt::format("delta must lie in (0, 2) (got {})", delta));
  if (variant.is_frustrated() && !(variant.K > 0.0 && variant.K <= 1.0))
    throw ArgumentError(fmt::format("K must lie in (0, 1] (got {})", variant.K));
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::above_two: return "alpha_prime>2";
    case Regime::two: return "alpha_prime=2";
    case Regime::one_to_two: return "1<alpha_prime<2";
  }
  throw ArgumentError("unknown regime");
}

Regime regime_of(double alpha_prime) {
  if (!(alpha_prime > 1.0)) throw DomainError(fmt::format("alpha' must exceed 1 (got {})", alpha_prime));
  if (std::abs(alpha_prime - 2.0) <= 1e-12) return Regime::two;
  return alpha_prime > 2.0 ? Regime::above_two : Regime::one_to_two;
}

CaseConstants case_constants(const BoundParams& p) {
  p.validate();
  CaseConstants cc;
  cc.alpha_prime = p.alpha_prime();
  cc.regime = regime_of(cc.alpha_prime);
  cc.b = block_norm_constant(p.alpha, p.h, p.variant);
  const long double a = cc.alpha_prime;
  const long double b = cc.b;
  switch (cc.regime) {
    case Regime::above_two: {
      const long double g = 1 - std::exp2l(-(a - 2) / 2);
      cc.c1 = static_cast<double>(b * 16 * kE2 / (g * g));
      cc.c2 = static_cast<double>(b * std::exp2l(2 + a) * kE2 / ((1 - std::exp2l(-a)) * g * g));
      break;
    }
    case Regime::two:
      cc.c1 = static_cast<double>(b * 16 * kE2);
      cc.c2 = static_cast<double>(b * 64 * kE2 / 3);
      break;
    case Regime::one_to_two: {
      const long double g = 1 - std::exp2l(-(2 - a) / 2);
      cc.c1 = static_cast<double>(b * 32 * kE2 / (g * g));
      cc.c2 = static_cast<double>(b * std::exp2l(2 + a) * kE2 / ((1 - std::exp2l(-a)) * g * g));
      break;
    }
  }
  return cc;
}

double effective_distance(int R, const CaseConstants& cc) {
  const double Rd = R;
  switch (cc.regime) {
    case Regime::above_two: return Rd;
    case Regime::two: {
      const double l = std::log2(Rd);
      return Rd / (l * l);
    }
    case Regime::one_to_two: return std::pow(Rd, cc.alpha_prime - 1.0);
  }
  return Rd;
}

int quantized_distance(int r) {
  if (r < 2) throw DegenerateDistanceError(fmt::format("distance must be >= 2 (got {})", r));
  return window_params(0, r).R;
}

ScaleContributions scale_contributions(int R, double t, const BoundParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw ArgumentError(fmt::format("t must be nonnegative (got {})", t));
  const Thresholds th = long_thresholds(p.alpha_prime(), R);
  const long double b = block_norm_constant(p.alpha, p.h, p.variant);
  const long double ap = p.alpha_prime();
  ScaleContributions out;
  long double total = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int q = 1; q <= th.n_star; ++q) {
    ScaleContribution c;
    c.q = q;
    c.N_q = th.N_of(q);
    const long double slots = static_cast<long double>(R >> (q - 1));
    const long double N = c.N_q;
    if (t == 0.0 || N > slots) {
      c.log_s = -std::numeric_limits<double>::infinity();
      c.s = 0.0;
    } else {
      const long double log_binom = std::lgammal(slots + 1) - std::lgammal(N + 1) - std::lgammal(slots - N + 1);
      const long double log_rate = std::log(2 * b * static_cast<long double>(t)) - q * (ap - 1) * std::numbers::ln2_v<long double>;
      const long double log_s = log_binom + N * log_rate - std::lgammal(N + 1);
      c.log_s = static_cast<double>(log_s);
      c.s = static_cast<double>(std::exp(log_s));
    }
    if (c.log_s > best) {
      best = c.log_s;
      out.argmax_q = q;
    }
    total += std::exp(static_cast<long double>(c.log_s));
    out.per_scale.push_back(c);
  }
  out.total = static_cast<double>(total);
  const long double bound = std::expm1(total);
  out.overflow = !std::isfinite(static_cast<double>(bound));
  out.bound = out.overflow ? std::numeric_limits<double>::infinity() : static_cast<double>(bound);
  return out;
}

CurveValue commutator_bound_curve(int r, double t, const BoundParams& p) {
  if (!(t >= 0.0)) throw ArgumentError(fmt::format("t must be nonnegative (got {})", t));
  const CaseConstants cc = case_constants(p);
  const double Reff = effective_distance(quantized_distance(r), cc);
  CurveValue v;
  if (cc.c1 * t >= Reff) {
    v.value = 2.0;
    v.capped = true;
    v.beyond_validity = true;
    return v;
  }
  const double raw = 4.0 * (cc.c1 * t / (Reff - cc.c1 * t) + cc.c2 * t / Reff);
  v.capped = raw > 2.0;
  v.value = v.capped ? 2.0 : raw;
  return v;
}

double scrambling_time_bound(int r, const BoundParams& p) {
  const CaseConstants cc = case_constants(p);
  const double Reff = effective_distance(quantized_distance(r), cc);
  return p.delta * Reff / (4.0 * (2.0 * cc.c1 + cc.c2));
}

double displayed_scrambling_coefficient(const BoundParams& p) {
  p.validate();
  const long double a = p.alpha_prime();
  const long double pre = p.delta / (2 * static_cast<long double>(block_norm_constant(p.alpha, p.h, p.variant)));
  switch (regime_of(p.alpha_prime())) {
    case Regime::above_two: {
      const long double g = 1 - std::exp2l(-(a - 2) / 2);
      return static_cast<double>(pre * (1 - std::exp2l(-a)) * g * g / ((32 + std::exp2l(2 + a)) * kE2));
    }
    case Regime::two:
      return static_cast<double>(pre * 3 / (160 * kE2));
    case Regime::one_to_two: {
      const long double g = 1 - std::exp2l(-(2 - a) / 2);
      return static_cast<double>(pre * (1 - std::exp2l(-a)) * g * g / ((64 + std::exp2l(2 + a)) * kE2));
    }
  }
  return 0.0;
}

double displayed_scrambling_time(int r, const BoundParams& p) {
  if (r < 2) throw DegenerateDistanceError(fmt::format("distance must be >= 2 (got {})", r));
  const double kappa = displayed_scrambling_coefficient(p);
  const double rd = r;
  switch (regime_of(p.alpha_prime())) {
    case Regime::above_two: return kappa * rd;
    case Regime::two: {
      const double l = std::log2(rd);
      return kappa * rd / (l * l);
    }
    case Regime::one_to_two: return kappa * std::pow(rd, p.alpha_prime() - 1.0);
  }
  return 0.0;
}

std::vector<BoundRow> bound_table(const BoundParams& p, int r_min, int r_max) {
  if (r_min < 2) throw DegenerateDistanceError(fmt::format("r_min must be >= 2 (got {})", r_min));
  if (r_max < r_min) throw ArgumentError("r_max must be >= r_min");
  const CaseConstants cc = case_constants(p);
  std::vector<BoundRow> rows;
  rows.reserve(static_cast<std::size_t>(r_max - r_min + 1));
  for (int r = r_min; r <= r_max; ++r)
    rows.push_back({r, quantized_distance(r), cc.regime, cc.b, cc.c1, cc.c2, scrambling_time_bound(r, p)});
  return rows;
}

BoundCurve bound_curve(int r, const BoundParams& p, const std::vector<double>& times) {
  const CaseConstants cc = case_constants(p);
  BoundCurve c;
  c.r = r;
  c.R = quantized_distance(r);
  c.effective = effective_distance(c.R, cc);
  c.c1 = cc.c1;
  c.c2 = cc.c2;
  c.validity_time = c.effective / cc.c1;
  for (double t : times) c.samples.emplace_back(t, commutator_bound_curve(r, t, p).value);
  return c;
}

void to_json(nlohmann::json& j, const BoundParams& p) {
  j = nlohmann::json{{"alpha", p.alpha},
                     {"h", p.h},
                     {"delta", p.delta},
                     {"variant", p.variant.is_frustrated() ? "frustrated" : "general"},
                     {"K", p.variant.K}};
}

void from_json(const nlohmann::json& j, BoundParams& p) {
  BoundParams out;
  if (j.contains("alpha")) j.at("alpha").get_to(out.alpha);
  if (j.contains("h")) j.at("h").get_to(out.h);
  if (j.contains("delta")) j.at("delta").get_to(out.delta);
  if (j.contains("K")) j.at("K").get_to(out.variant.K);
  if (j.contains("variant")) {
    const auto v = j.at("variant").get<std::string>();
    if (v == "frustrated") out.variant.kind = NormVariant::Kind::frustrated;
    else if (v == "general") out.variant.kind = NormVariant::Kind::general;
    else throw ArgumentError(fmt::format("unknown variant '{}'", v));
  }
  p = out;
}

}  // namespace lightcone
