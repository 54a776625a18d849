#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "lightcone/decomposition.hpp"

namespace lightcone {

struct BoundParams {
  double alpha = 4.0;
  double h = 1.0;
  double delta = 0.5;
  NormVariant variant;

  double alpha_prime() const { return alpha_prime_of(alpha, variant); }
  /// alpha > 2, h > 0, 0 < delta < 2, K in (0, 1] for the frustrated variant.
  void validate() const;
};

enum class Regime { above_two, two, one_to_two };

std::string to_string(Regime r);

/// alpha' == 2 is matched within 1e-12.
Regime regime_of(double alpha_prime);

struct CaseConstants {
  Regime regime = Regime::above_two;
  double alpha_prime = 0.0;
  double b = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

CaseConstants case_constants(const BoundParams& p);

/// R, R / log2(R)^2 or R^(alpha' - 1) by regime.
double effective_distance(int R, const CaseConstants& cc);

/// 2^floor(log2 r); DegenerateDistanceError for r < 2.
int quantized_distance(int r);

struct ScaleContribution {
  int q = 0;
  int N_q = 0;
  double log_s = 0.0;  // -inf when s = 0
  double s = 0.0;
};

struct ScaleContributions {
  std::vector<ScaleContribution> per_scale;
  double total = 0.0;  // sum of s_q
  double bound = 0.0;  // exp(total) - 1, +inf past overflow
  int argmax_q = 0;
  bool overflow = false;
};

/// s_q(t) = C(2^(1-q) R, N_q) (2 b t 2^(-q (alpha' - 1)))^N_q / N_q!, q = 1..log2 R.
ScaleContributions scale_contributions(int R, double t, const BoundParams& p);

struct CurveValue {
  double value = 0.0;
  bool capped = false;  // trivial cap 2 applied
  bool beyond_validity = false;
};

/// min(2, 4 [c1 t / (Reff - c1 t) + c2 t / Reff]) for the quantized distance of r.
CurveValue commutator_bound_curve(int r, double t, const BoundParams& p);

/// delta Reff / (4 (2 c1 + c2)).
double scrambling_time_bound(int r, const BoundParams& p);

/// Coefficient kappa of the closed-form statement t_s >= kappa * f(r) with
/// f(r) = r, r / log2(r)^2, r^(alpha' - 1) by regime; it equals
/// delta / (2 (2 c1 + c2)) at alpha' = 2.
double displayed_scrambling_coefficient(const BoundParams& p);
double displayed_scrambling_time(int r, const BoundParams& p);

struct BoundRow {
  int r = 0;
  int R = 0;
  Regime regime = Regime::above_two;
  double b = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double ts_bound = 0.0;
};

std::vector<BoundRow> bound_table(const BoundParams& p, int r_min, int r_max);

struct BoundCurve {
  int r = 0;
  int R = 0;
  double effective = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double validity_time = 0.0;  // Reff / c1
  std::vector<std::pair<double, double>> samples;
};

BoundCurve bound_curve(int r, const BoundParams& p, const std::vector<double>& times);

void to_json(nlohmann::json& j, const BoundParams& p);
void from_json(const nlohmann::json& j, BoundParams& p);

}  // namespace lightcone
