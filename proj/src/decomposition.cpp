#include "lightcone/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fmt/format.h>

#include "lightcone/errors.hpp"

namespace lightcone {

WindowParams window_params(int i, int j) {
  if (j - i < 2)
    throw DegenerateDistanceError(
        fmt::format("window needs j - i >= 2 (got i={}, j={})", i, j));
  WindowParams wp;
  wp.i = i;
  wp.j = j;
  wp.n_star = std::bit_width(static_cast<unsigned>(j - i)) - 1;
  wp.R = 1 << wp.n_star;
  wp.i_prime = j - wp.R + 1;
  return wp;
}

int exact_log2(int R) {
  if (R < 2 || !std::has_single_bit(static_cast<unsigned>(R)))
    throw ArgumentError(fmt::format("R must be a power of two >= 2 (got {})", R));
  return std::countr_zero(static_cast<unsigned>(R));
}

std::string to_string(const BlockLabel& b) { return fmt::format("({},{})", b.q, b.k); }

std::vector<BlockLabel> block_labels(int R) {
  const int n_star = exact_log2(R);
  std::vector<BlockLabel> labels;
  for (int q = 1; q <= n_star; ++q)
    for (int k = 0;; ++k) {
      const BlockLabel b{q, k};
      if (b.right_edge() > R) break;
      labels.push_back(b);
    }
  return labels;
}

BlockLabel assign_block(int m, int n, int R) {
  const int n_star = exact_log2(R);
  if (m < 1 || n <= m || n > R)
    throw ArgumentError(fmt::format("pair ({},{}) outside 1 <= m < n <= {}", m, n, R));
  for (int q = 1; q <= n_star; ++q) {
    const int w = 1 << (q - 1);
    for (int k = (m - 1) / w; k >= 0; --k) {
      const BlockLabel b{q, k};
      if (b.right_edge() > R || n > b.right_edge()) continue;
      return b;
    }
  }
  // The scale-n_star window (0, R] holds every pair.
  throw ArgumentError(fmt::format("no block holds ({},{}) at R={}", m, n, R));
}

const ScaleBlock& Decomposition::block(const BlockLabel& label) const {
  auto it = std::lower_bound(blocks.begin(), blocks.end(), label,
                             [](const ScaleBlock& b, const BlockLabel& l) { return b.label < l; });
  if (it == blocks.end() || it->label != label)
    throw ArgumentError(fmt::format("no block {} at R={}", to_string(label), R()));
  return *it;
}

namespace {

std::vector<ScaleBlock> empty_blocks(int R) {
  std::vector<ScaleBlock> blocks;
  for (const auto& label : block_labels(R)) blocks.push_back(ScaleBlock{label, {}, {}, {}});
  return blocks;
}

ScaleBlock& find_block(std::vector<ScaleBlock>& blocks, const BlockLabel& label) {
  auto it = std::lower_bound(blocks.begin(), blocks.end(), label,
                             [](const ScaleBlock& b, const BlockLabel& l) { return b.label < l; });
  return *it;
}

}  // namespace

Decomposition decompose_window(int R) {
  Decomposition d;
  d.window = WindowParams{1, R, exact_log2(R), R, 1};
  d.blocks = empty_blocks(R);
  for (int m = 1; m <= R; ++m)
    for (int n = m + 1; n <= R; ++n) {
      auto& b = find_block(d.blocks, assign_block(m, n, R));
      b.members.emplace_back(m, n);
      b.couplings.emplace_back(m, n);
    }
  return d;
}

Decomposition build_decomposition(const WindowParams& wp, const CouplingSet& cs) {
  Decomposition d;
  d.window = wp;
  d.blocks = empty_blocks(wp.R);
  const auto relabel = [&](int site) { return std::clamp(site - wp.i_prime + 1, 1, wp.R); };

  for (const auto& [pair, term] : cs.pair_terms) {
    const int m = relabel(pair.first);
    const int n = relabel(pair.second);
    if (m == n) {
      d.absorbed.push_back(pair);
      continue;
    }
    auto& b = find_block(d.blocks, assign_block(m, n, wp.R));
    b.couplings.push_back(pair);
    b.members.emplace_back(m, n);
    if (!b.op) b.op.emplace(term.n_sites());
    *b.op += term;
  }
  for (auto& b : d.blocks) {
    std::sort(b.members.begin(), b.members.end());
    b.members.erase(std::unique(b.members.begin(), b.members.end()), b.members.end());
    if (!b.op) b.op.emplace(static_cast<std::size_t>(cs.n_sites()));
  }
  return d;
}

nlohmann::json to_json(const Decomposition& d) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : d.blocks) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& [m, n] : b.members) members.push_back({m, n});
    blocks.push_back({{"q", b.label.q}, {"k", b.label.k}, {"members", std::move(members)}});
  }
  return {{"R", d.R()}, {"blocks", std::move(blocks)}};
}

double alpha_prime_of(double alpha, const NormVariant& variant) {
  return variant.is_frustrated() ? alpha : alpha - 1.0;
}

double block_norm_constant(double alpha, double h, const NormVariant& variant) {
  if (!(alpha > 2.0) || !std::isfinite(alpha))
    throw DomainError(fmt::format("block norm bound needs alpha > 2 (got {})", alpha));
  if (!(h > 0.0)) throw DomainError(fmt::format("h must be positive (got {})", h));
  const long double a = alpha;
  if (variant.is_frustrated()) {
    if (!(variant.K > 0.0) || variant.K > 1.0)
      throw ArgumentError(fmt::format("frustration constant K must lie in (0, 1] (got {})", variant.K));
    return static_cast<double>(h * std::exp2l(2 * a - 0.5L) / ((a - 1) * variant.K));
  }
  return static_cast<double>(h * std::exp2l(a + 2) / ((a - 1) * (a - 2)));
}

double block_norm_bound(int q, double alpha, double h, const NormVariant& variant) {
  if (q < 1) throw ArgumentError(fmt::format("scale q must be >= 1 (got {})", q));
  const long double b = block_norm_constant(alpha, h, variant);
  const long double ap = alpha_prime_of(alpha, variant);
  return static_cast<double>(b * std::exp2l(-q * (ap - 1)));
}

std::int64_t Thresholds::slack_sum() const {
  std::int64_t s = 0;
  for (int q = 1; q <= n_star; ++q)
    s += (std::int64_t{1} << q) * (N_of(q) - 1);
  return s;
}

Thresholds long_thresholds(double alpha_prime, int R) {
  if (!(alpha_prime > 1.0))
    throw DomainError(fmt::format("thresholds need alpha' > 1 (got {})", alpha_prime));
  Thresholds th;
  th.alpha_prime = alpha_prime;
  th.R = R;
  th.n_star = exact_log2(R);
  const long double ap = alpha_prime;
  long double M = 0;
  for (int q = 1; q <= th.n_star; ++q) M += std::exp2l(-q * (ap - 2) / 2);
  th.M = static_cast<double>(M);
  for (int q = 1; q <= th.n_star; ++q) {
    const long double x = 0.5L * std::exp2l(-q * (ap - 2) / 2) / M *
                          static_cast<long double>(R) / std::exp2l(q);
    // Guard exact integers against rounding just above them.
    const long double c = std::ceil(x - 1e-15L * std::max(1.0L, x));
    th.N.push_back(std::max(1, static_cast<int>(c)));
    if (th.q_star == 0 && th.N.back() == 1) th.q_star = q;
  }
  return th;
}

}  // namespace lightcone
