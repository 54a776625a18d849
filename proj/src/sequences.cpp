#include "lightcone/sequences.hpp"

#include <algorithm>
#include <bit>
#include <fmt/format.h>
#include <unordered_map>

#include "lightcone/errors.hpp"

namespace lightcone {

void validate_sequence(const BlockSequence& s, int R) {
  const int n_star = exact_log2(R);
  for (const auto& b : s)
    if (b.q < 1 || b.q > n_star || b.k < 0 || b.right_edge() > R)
      throw ArgumentError(fmt::format("step {} is not a block label for R={}", to_string(b), R));
}

std::string to_string(const BlockSequence& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += to_string(s[i]);
  }
  return out + "]";
}

nlohmann::json to_json(const BlockSequence& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& b : s) out.push_back({b.q, b.k});
  return out;
}

bool is_creeping(const BlockSequence& s) {
  if (s.empty()) return true;
  if (s.front().k != 0) return false;
  int reach = s.front().right_edge();
  for (std::size_t m = 1; m < s.size(); ++m) {
    if (s[m].left_edge() + 1 > reach) return false;
    reach = std::max(reach, s[m].right_edge());
  }
  return true;
}

int frontier(const BlockSequence& s) {
  int reach = 1;
  for (const auto& b : s) reach = std::max(reach, b.right_edge());
  return reach;
}

bool is_forward(const BlockSequence& s, int j1, int j2) {
  if (s.empty()) return false;
  if (s.front().left_edge() != j1 || s.back().right_edge() != j2) return false;
  for (std::size_t m = 1; m < s.size(); ++m)
    if (s[m].right_edge() <= s[m - 1].right_edge()) return false;
  return true;
}

std::vector<int> extract_q_forward(const BlockSequence& s, int q) {
  std::vector<int> out;
  int record = 0;
  for (std::size_t m = 0; m < s.size(); ++m) {
    const int edge = s[m].right_edge();
    if (s[m].q == q && edge > record) out.push_back(static_cast<int>(m));
    record = std::max(record, edge);
  }
  return out;
}

ClassificationResult classify(const BlockSequence& s, const Thresholds& th) {
  validate_sequence(s, th.R);
  ClassificationResult c;
  c.creeping = is_creeping(s);
  c.frontier = frontier(s);
  for (int q = 1; q <= th.n_star; ++q) {
    auto beta = extract_q_forward(s, q);
    const int N = th.N_of(q);
    if (static_cast<int>(beta.size()) >= N) {
      c.long_scales.push_back(q);
      c.irreducible[q] = std::vector<int>(beta.begin(), beta.begin() + N);
    }
    c.q_forward[q] = std::move(beta);
  }
  return c;
}

std::string to_string(CountMode mode) { return mode == CountMode::closed_form ? "closed_form" : "exact"; }

CountMode count_mode_from_string(std::string_view name) {
  if (name == "closed_form") return CountMode::closed_form;
  if (name == "exact") return CountMode::exact;
  throw ArgumentError(fmt::format("unknown count mode '{}'", name));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    acc = acc * (n - i) / (i + 1);
    if (acc > UINT64_MAX)
      throw ResourceError(fmt::format("C({}, {}) overflows 64 bits", n, k));
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw ResourceError("count overflows 64 bits");
  return out;
}

}  // namespace

std::uint64_t count_irreducible(int R, int q, int N, CountMode mode) {
  const int n_star = exact_log2(R);
  if (q < 1 || q > n_star) throw ArgumentError(fmt::format("scale {} outside 1..{}", q, n_star));
  if (N < 0) throw ArgumentError("N must be nonnegative");
  const std::uint64_t slots = static_cast<std::uint64_t>(R) >> (q - 1);
  return binomial(mode == CountMode::closed_form ? slots : slots - 1, static_cast<std::uint64_t>(N));
}

std::uint64_t count_irreducible_z(int R, const std::vector<int>& Z, const Thresholds& th,
                                  CountMode mode) {
  if (Z.empty()) throw ArgumentError("scale set Z must be nonempty");
  if (th.R != R) throw ArgumentError("thresholds built for a different R");
  std::vector<int> sorted = Z;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ArgumentError("scale set Z has repeated entries");
  std::uint64_t total = 1;
  std::uint64_t placed = 0;
  for (int q : sorted) {
    const int N = th.N_of(q);
    placed += static_cast<std::uint64_t>(N);
    total = checked_mul(total, binomial(placed, static_cast<std::uint64_t>(N)));
    total = checked_mul(total, count_irreducible(R, q, N, mode));
  }
  return total;
}

std::uint64_t enumerate_irreducible(int R, int q, int N) {
  const auto alphabet = block_labels(R);
  BlockSequence s;
  std::uint64_t count = 0;
  auto walk = [&](auto&& self) -> void {
    if (static_cast<int>(s.size()) == N) {
      ++count;
      return;
    }
    for (const auto& b : alphabet) {
      s.push_back(b);
      if (extract_q_forward(s, q).size() == s.size()) self(self);
      s.pop_back();
    }
  };
  walk(walk);
  return count;
}

std::uint64_t enumerate_irreducible_z(int R, const std::map<int, int>& N) {
  const auto alphabet = block_labels(R);
  int total = 0;
  for (const auto& [q, n] : N) total += n;
  std::map<int, int> used;
  std::map<int, int> last_edge;
  std::uint64_t count = 0;
  int depth = 0;
  auto walk = [&](auto&& self) -> void {
    if (depth == total) {
      ++count;
      return;
    }
    for (const auto& b : alphabet) {
      auto it = N.find(b.q);
      if (it == N.end() || used[b.q] == it->second) continue;
      if (used[b.q] > 0 && b.right_edge() <= last_edge[b.q]) continue;
      const int saved = last_edge[b.q];
      ++used[b.q];
      last_edge[b.q] = b.right_edge();
      ++depth;
      self(self);
      --depth;
      last_edge[b.q] = saved;
      --used[b.q];
    }
  };
  walk(walk);
  return count;
}

std::uint64_t sequence_space_size(std::size_t alphabet, int max_len) {
  unsigned __int128 total = 0;
  unsigned __int128 power = 1;
  for (int len = 0; len <= max_len; ++len) {
    total += power;
    power *= alphabet;
    if (total > UINT64_MAX || power > (static_cast<unsigned __int128>(1) << 100))
      return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

namespace {

constexpr std::size_t kMaxWitnesses = 8;

void check_budget(std::size_t alphabet, int max_len, std::uint64_t budget) {
  const std::uint64_t size = sequence_space_size(alphabet, max_len);
  if (size > budget)
    throw ResourceError(fmt::format(
        "enumeration of {} sequences exceeds the budget of {}", size, budget));
}

int inclusion_exclusion_sum(std::size_t s) {
  int sum = 0;
  for (std::uint64_t z = 1; z < (std::uint64_t{1} << s); ++z)
    sum += (std::popcount(z) % 2 == 1) ? 1 : -1;
  return sum;
}

struct CoverageWalker {
  const Thresholds& th;
  const std::vector<BlockLabel>& alphabet;
  int max_len;
  CoverageReport& out;

  BlockSequence seq;
  std::vector<int> forward_count;  // by scale, index q

  void visit(bool creeping, int reach) {
    ++out.checked;
    std::size_t long_count = 0;
    for (int q = 1; q <= th.n_star; ++q)
      if (forward_count[q] >= th.N_of(q)) ++long_count;

    if (creeping && reach == th.R) {
      ++out.creeping_frontier;
      if (long_count == 0) record("coverage", out.coverage_violations);
    }
    if (long_count > 0) {
      ++out.multiplicity_checked;
      if (inclusion_exclusion_sum(long_count) != 1) record("multiplicity", out.multiplicity_violations);
    }
  }

  void record(const char* kind, std::uint64_t& counter) {
    ++counter;
    if (counter <= kMaxWitnesses) out.counterexamples.push_back({kind, seq});
  }

  void extend(bool creeping, int reach) {
    if (static_cast<int>(seq.size()) == max_len) return;
    for (const auto& b : alphabet) step(b, creeping, reach);
  }

  void step(const BlockLabel& b, bool creeping, int reach) {
    const bool c = seq.empty() ? b.k == 0 : creeping && b.left_edge() + 1 <= reach;
    const int record_edge = seq.empty() ? 0 : reach;
    const bool is_record = b.right_edge() > record_edge;
    const int new_reach = std::max(record_edge, b.right_edge());
    seq.push_back(b);
    if (is_record) ++forward_count[b.q];
    visit(c, new_reach);
    extend(c, new_reach);
    if (is_record) --forward_count[b.q];
    seq.pop_back();
  }
};

CoverageReport coverage_partition(const Thresholds& th, const std::vector<BlockLabel>& alphabet,
                                  int max_len, std::size_t first) {
  CoverageReport part;
  CoverageWalker w{th, alphabet, max_len, part, {}, std::vector<int>(th.n_star + 1, 0)};
  w.step(alphabet[first], true, 1);
  return part;
}

CoverageReport coverage_header(const Thresholds& th, int max_len,
                               const std::vector<BlockLabel>& alphabet, std::uint64_t budget) {
  if (max_len < 0) throw ArgumentError("max_len must be nonnegative");
  check_budget(alphabet.size(), max_len, budget);
  CoverageReport r;
  r.R = th.R;
  r.max_len = max_len;
  r.thresholds = th;
  // The empty sequence: creeping, frontier 1 < R, no long scales.
  CoverageWalker w{th, alphabet, 0, r, {}, std::vector<int>(th.n_star + 1, 0)};
  w.visit(true, 1);
  return r;
}

void merge(CoverageReport& into, const CoverageReport& part) {
  into.checked += part.checked;
  into.creeping_frontier += part.creeping_frontier;
  into.multiplicity_checked += part.multiplicity_checked;
  for (const auto& c : part.counterexamples) {
    const auto already = std::count_if(into.counterexamples.begin(), into.counterexamples.end(),
                                       [&](const Counterexample& e) { return e.kind == c.kind; });
    if (static_cast<std::size_t>(already) < kMaxWitnesses) into.counterexamples.push_back(c);
  }
  into.coverage_violations += part.coverage_violations;
  into.multiplicity_violations += part.multiplicity_violations;
}

}  // namespace

nlohmann::json to_json(const CoverageReport& r) {
  nlohmann::json ce = nlohmann::json::array();
  for (const auto& c : r.counterexamples)
    ce.push_back({{"kind", c.kind}, {"sequence", to_json(c.sequence)}});
  return {{"check", "coverage"},
          {"R", r.R},
          {"max_len", r.max_len},
          {"alpha_prime", r.thresholds.alpha_prime},
          {"N", r.thresholds.N},
          {"checked", r.checked},
          {"creeping_frontier", r.creeping_frontier},
          {"multiplicity_checked", r.multiplicity_checked},
          {"coverage_violations", r.coverage_violations},
          {"multiplicity_violations", r.multiplicity_violations},
          {"counterexamples", std::move(ce)}};
}

CoverageReport verify_coverage(const Thresholds& th, int max_len, std::uint64_t budget) {
  const auto alphabet = block_labels(th.R);
  CoverageReport r = coverage_header(th, max_len, alphabet, budget);
  if (max_len == 0) return r;
  std::vector<CoverageReport> parts(alphabet.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t f = 0; f < alphabet.size(); ++f)
    parts[f] = coverage_partition(th, alphabet, max_len, f);
  for (const auto& p : parts) merge(r, p);
  return r;
}

CoverageReport verify_coverage_serial(const Thresholds& th, int max_len, std::uint64_t budget) {
  const auto alphabet = block_labels(th.R);
  CoverageReport r = coverage_header(th, max_len, alphabet, budget);
  if (max_len == 0) return r;
  for (std::size_t f = 0; f < alphabet.size(); ++f)
    merge(r, coverage_partition(th, alphabet, max_len, f));
  return r;
}

std::string to_string(FillerRule rule) {
  switch (rule) {
    case FillerRule::midpoint: return "midpoint";
    case FillerRule::unrestricted: return "unrestricted";
    case FillerRule::record_preserving: return "record_preserving";
  }
  throw ArgumentError("unknown filler rule");
}

FillerRule filler_rule_from_string(std::string_view name) {
  if (name == "midpoint") return FillerRule::midpoint;
  if (name == "unrestricted") return FillerRule::unrestricted;
  if (name == "record_preserving") return FillerRule::record_preserving;
  throw ArgumentError(fmt::format("unknown filler rule '{}'", name));
}

namespace {

// Sequences packed 5 bits per step (alphabet index + 1).
using SeqKey = std::uint64_t;
constexpr int kMaxPackedLen = 12;

SeqKey push_key(SeqKey key, std::size_t index) { return (key << 5) | (index + 1); }

BlockSequence unpack(SeqKey key, const std::vector<BlockLabel>& alphabet) {
  BlockSequence s;
  for (; key; key >>= 5) s.push_back(alphabet[(key & 31) - 1]);
  std::reverse(s.begin(), s.end());
  return s;
}

bool filler_allowed(FillerRule rule, const BlockLabel& x, const std::vector<BlockLabel>& lambda,
                    std::size_t p) {
  switch (rule) {
    case FillerRule::midpoint: return x.midpoint() < lambda[p].midpoint();
    case FillerRule::unrestricted: return true;
    case FillerRule::record_preserving: {
      const int prev = p == 0 ? 0 : lambda[p - 1].right_edge();
      if (x.right_edge() >= lambda[p].right_edge()) return false;
      return !(x.q == lambda[p].q && x.right_edge() > prev);
    }
  }
  return false;
}

}  // namespace

nlohmann::json to_json(const ResummationReport& r) {
  auto list = [](const std::vector<BlockSequence>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : v) out.push_back(to_json(s));
    return out;
  };
  return {{"check", "resummation"},
          {"R", r.R},
          {"q", r.q},
          {"order", r.order},
          {"N_q", r.N_q},
          {"rule", to_string(r.rule)},
          {"checked", r.lhs_size},
          {"generated", r.rhs_size},
          {"ok", r.ok()},
          {"missing", r.missing},
          {"double_counted", r.double_counted},
          {"extra", r.extra},
          {"counterexamples",
           {{"missing", list(r.missing_witnesses)},
            {"double_counted", list(r.double_witnesses)},
            {"extra", list(r.extra_witnesses)}}}};
}

ResummationReport verify_resummation(const Thresholds& th, int q, int order, FillerRule rule,
                                     std::uint64_t budget) {
  if (q < 1 || q > th.n_star) throw ArgumentError(fmt::format("scale {} outside 1..{}", q, th.n_star));
  if (order < 0 || order > kMaxPackedLen)
    throw ArgumentError(fmt::format("order must lie in 0..{}", kMaxPackedLen));
  const auto alphabet = block_labels(th.R);
  if (alphabet.size() > 31) throw ResourceError("block alphabet too large for resummation check");
  check_budget(alphabet.size(), order, budget);

  ResummationReport r;
  r.R = th.R;
  r.q = q;
  r.order = order;
  r.N_q = th.N_of(q);
  r.rule = rule;
  const auto N = static_cast<std::size_t>(r.N_q);

  // Left side: all sequences with a long q-forward subsequence.
  std::vector<SeqKey> lhs;
  {
    BlockSequence s;
    auto walk = [&](auto&& self, SeqKey key) -> void {
      if (extract_q_forward(s, q).size() >= N) lhs.push_back(key);
      if (static_cast<int>(s.size()) == order) return;
      for (std::size_t a = 0; a < alphabet.size(); ++a) {
        s.push_back(alphabet[a]);
        self(self, push_key(key, a));
        s.pop_back();
      }
    };
    walk(walk, 0);
  }
  r.lhs_size = lhs.size();

  // Right side: lambda in F_q, fillers before each lambda_p, free tail.
  std::unordered_map<SeqKey, std::uint32_t> generated;
  std::vector<std::size_t> scale_q;
  for (std::size_t a = 0; a < alphabet.size(); ++a)
    if (alphabet[a].q == q) scale_q.push_back(a);

  std::vector<std::size_t> lambda_idx;
  std::vector<BlockLabel> lambda;
  auto emit_tail = [&](auto&& self, SeqKey key, int len) -> void {
    ++generated[key];
    ++r.rhs_size;
    if (len == order) return;
    for (std::size_t a = 0; a < alphabet.size(); ++a) self(self, push_key(key, a), len + 1);
  };
  auto weave = [&](auto&& self, std::size_t p, SeqKey key, int len) -> void {
    if (p == N) {
      emit_tail(emit_tail, key, len);
      return;
    }
    const int remaining = static_cast<int>(N - p);
    if (len + remaining > order) return;
    // Place lambda_p now, or one more allowed filler first.
    self(self, p + 1, push_key(key, lambda_idx[p]), len + 1);
    if (len + remaining + 1 > order) return;
    for (std::size_t a = 0; a < alphabet.size(); ++a)
      if (filler_allowed(rule, alphabet[a], lambda, p)) self(self, p, push_key(key, a), len + 1);
  };
  auto choose = [&](auto&& self, std::size_t start) -> void {
    if (lambda_idx.size() == N) {
      weave(weave, 0, 0, 0);
      return;
    }
    for (std::size_t i = start; i < scale_q.size(); ++i) {
      lambda_idx.push_back(scale_q[i]);
      lambda.push_back(alphabet[scale_q[i]]);
      self(self, i + 1);
      lambda.pop_back();
      lambda_idx.pop_back();
    }
  };
  choose(choose, 0);

  std::vector<SeqKey> lhs_sorted = lhs;
  std::sort(lhs_sorted.begin(), lhs_sorted.end());
  for (SeqKey key : lhs) {
    auto it = generated.find(key);
    if (it == generated.end()) {
      if (++r.missing <= kMaxWitnesses) r.missing_witnesses.push_back(unpack(key, alphabet));
    }
  }
  std::vector<std::pair<SeqKey, std::uint32_t>> gen_sorted(generated.begin(), generated.end());
  std::sort(gen_sorted.begin(), gen_sorted.end());
  for (const auto& [key, mult] : gen_sorted) {
    const bool in_lhs = std::binary_search(lhs_sorted.begin(), lhs_sorted.end(), key);
    if (!in_lhs) {
      if (++r.extra <= kMaxWitnesses) r.extra_witnesses.push_back(unpack(key, alphabet));
    } else if (mult > 1) {
      if (++r.double_counted <= kMaxWitnesses) r.double_witnesses.push_back(unpack(key, alphabet));
    }
  }
  return r;
}

}  // namespace lightcone
