#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lightcone/lattice.hpp"

namespace lightcone {

/// Dyadic window for a pair of sites i < j: R = 2^floor(log2(j - i)) and the
/// left end pushed forward to i' = j - R + 1.
struct WindowParams {
  int i = 0;
  int j = 0;
  int n_star = 0;
  int R = 0;
  int i_prime = 0;
};

/// Requires j - i >= 2; throws DegenerateDistanceError otherwise.
WindowParams window_params(int i, int j);

/// Exact log2 of a power of two >= 2; throws ArgumentError otherwise.
int exact_log2(int R);

/// Label (q, k) of a scale block. In relabeled coordinates the block couples
/// sites in the half-open window (left_edge, right_edge].
struct BlockLabel {
  int q = 1;
  int k = 0;

  int left_edge() const { return (1 << (q - 1)) * k; }
  int right_edge() const { return (1 << (q - 1)) * (k + 2); }
  int midpoint() const { return (1 << (q - 1)) * (k + 1); }

  friend auto operator<=>(const BlockLabel&, const BlockLabel&) = default;
};

std::string to_string(const BlockLabel& b);

/// All labels with right_edge <= R, ordered by (q, k).
std::vector<BlockLabel> block_labels(int R);

/// The unique block containing the relabeled pair 1 <= m < n <= R: smallest q
/// with a window (2^(q-1) k, 2^(q-1) (k+2)] holding both sites.
BlockLabel assign_block(int m, int n, int R);

struct ScaleBlock {
  BlockLabel label;
  std::vector<SitePair> members;    // relabeled pairs, sorted, unique
  std::vector<SitePair> couplings;  // physical pairs folded into this block
  std::optional<OperatorSum> op;    // H_(q,k), present when built from a model
};

struct Decomposition {
  WindowParams window;
  std::vector<ScaleBlock> blocks;  // one per label of block_labels(R)
  /// Physical couplings whose legs both fold onto the same end site; they act
  /// inside a grouped end region and belong to no block.
  std::vector<SitePair> absorbed;

  int R() const { return window.R; }
  const ScaleBlock& block(const BlockLabel& label) const;
};

/// Geometric decomposition of all pairs 1 <= m < n <= R.
Decomposition decompose_window(int R);

/// Folds every 2-local coupling of `cs` into the window's blocks: legs at or
/// left of i' map to m = 1, legs at or right of j map to n = R.
Decomposition build_decomposition(const WindowParams& wp, const CouplingSet& cs);

/// {"R": R, "blocks": [{"q", "k", "members": [[m, n], ...]}, ...]}
nlohmann::json to_json(const Decomposition& d);

struct NormVariant {
  enum class Kind { general, frustrated };
  Kind kind = Kind::general;
  double K = 1.0;

  static NormVariant general() { return {}; }
  static NormVariant frustrated(double K) { return {Kind::frustrated, K}; }
  bool is_frustrated() const { return kind == Kind::frustrated; }
};

/// alpha' = alpha for frustrated models, alpha - 1 otherwise.
double alpha_prime_of(double alpha, const NormVariant& variant);

/// The prefactor b of the block Liouvillian bound.
double block_norm_constant(double alpha, double h, const NormVariant& variant);

/// b * 2^(-q (alpha' - 1)), an upper bound on ||L_(q,k)|| <= 2 ||H_(q,k)||.
double block_norm_bound(int q, double alpha, double h, const NormVariant& variant);

/// Long-sequence thresholds N_q for q = 1..n_star.
struct Thresholds {
  double alpha_prime = 0.0;
  int R = 0;
  int n_star = 0;
  std::vector<int> N;  // N[q - 1]
  double M = 0.0;
  int q_star = 0;

  int N_of(int q) const { return N.at(static_cast<std::size_t>(q - 1)); }
  /// sum_q 2^q (N_q - 1), exact.
  std::int64_t slack_sum() const;
};

Thresholds long_thresholds(double alpha_prime, int R);

}  // namespace lightcone
