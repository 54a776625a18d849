#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "lightcone/decomposition.hpp"

namespace lightcone {

/// Ordered list of block labels (beta_1, ..., beta_n).
using BlockSequence = std::vector<BlockLabel>;

/// Throws ArgumentError unless every step is a label of block_labels(R).
void validate_sequence(const BlockSequence& s, int R);

std::string to_string(const BlockSequence& s);
nlohmann::json to_json(const BlockSequence& s);

/// k(beta_1) = 0 and every later step starts at or before the region reached
/// so far: left_edge + 1 <= max prior right_edge. The empty sequence is creeping.
bool is_creeping(const BlockSequence& s);

/// Largest right edge reached; 1 (the site of the initial operator) when empty.
int frontier(const BlockSequence& s);

/// Right edges strictly increase, left_edge(first) = j1, right_edge(last) = j2.
/// The empty sequence is not forward.
bool is_forward(const BlockSequence& s, int j1, int j2);

/// Indices m with q(beta_m) = q whose right edge beats every earlier right
/// edge (of any scale).
std::vector<int> extract_q_forward(const BlockSequence& s, int q);

struct ClassificationResult {
  bool creeping = true;
  int frontier = 1;
  std::map<int, std::vector<int>> q_forward;    // q -> indices, q = 1..n_star
  std::vector<int> long_scales;                 // ascending
  std::map<int, std::vector<int>> irreducible;  // q in long_scales -> first N_q indices
};

ClassificationResult classify(const BlockSequence& s, const Thresholds& th);

enum class CountMode { closed_form, exact };

std::string to_string(CountMode mode);
CountMode count_mode_from_string(std::string_view name);

/// Binomial coefficient; ResourceError if it does not fit in 64 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// |F_q|: C(2^(1-q) R, N) in closed_form mode, C(2^(1-q) R - 1, N) in exact mode.
std::uint64_t count_irreducible(int R, int q, int N, CountMode mode);

/// |F_Z|: (sum N_q)! / prod N_q! * prod |F_q|.
std::uint64_t count_irreducible_z(int R, const std::vector<int>& Z,
                                  const Thresholds& th, CountMode mode);

/// Number of irreducible q-forward sequences found by walking the label
/// alphabet: scale-q sequences of length N whose every step is a new record.
std::uint64_t enumerate_irreducible(int R, int q, int N);

/// Number of sequences built from scale-q steps, q in Z, with N[q] steps per
/// scale and strictly increasing right edges within each scale.
std::uint64_t enumerate_irreducible_z(int R, const std::map<int, int>& N);

/// Total number of sequences of length 0..max_len over `alphabet` letters.
std::uint64_t sequence_space_size(std::size_t alphabet, int max_len);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

struct Counterexample {
  std::string kind;  // "coverage" or "multiplicity"
  BlockSequence sequence;
};

struct CoverageReport {
  int R = 0;
  int max_len = 0;
  Thresholds thresholds;
  std::uint64_t checked = 0;
  std::uint64_t creeping_frontier = 0;   // creeping sequences reaching R
  std::uint64_t multiplicity_checked = 0;
  std::uint64_t coverage_violations = 0;
  std::uint64_t multiplicity_violations = 0;
  std::vector<Counterexample> counterexamples;  // first few of each kind

  bool ok() const { return coverage_violations == 0 && multiplicity_violations == 0; }
};

nlohmann::json to_json(const CoverageReport& r);

/// Exhaustive check over every sequence of length <= max_len: each creeping
/// sequence reaching the right end has a long scale, and every nonempty
/// long-scale set S satisfies sum over nonempty Z in S of (-1)^(|Z|+1) = 1.
/// Work is split by first step across OpenMP threads.
CoverageReport verify_coverage(const Thresholds& th, int max_len,
                               std::uint64_t budget = kDefaultEnumerationBudget);
CoverageReport verify_coverage_serial(const Thresholds& th, int max_len,
                                      std::uint64_t budget = kDefaultEnumerationBudget);

/// Which filler steps may precede the p-th irreducible step lambda_p.
enum class FillerRule {
  midpoint,          // midpoint(x) < midpoint(lambda_p)
  unrestricted,      // any step
  record_preserving  // right_edge(x) < right_edge(lambda_p), and a scale-q step
                     // may not beat right_edge(lambda_(p-1))
};

std::string to_string(FillerRule rule);
FillerRule filler_rule_from_string(std::string_view name);

struct ResummationReport {
  int R = 0;
  int q = 0;
  int order = 0;
  int N_q = 0;
  FillerRule rule = FillerRule::midpoint;
  std::uint64_t lhs_size = 0;        // sequences with chi_q = 1
  std::uint64_t rhs_size = 0;        // generated sequences, with multiplicity
  std::uint64_t missing = 0;         // in lhs, never generated
  std::uint64_t double_counted = 0;  // generated more than once
  std::uint64_t extra = 0;           // generated but chi_q = 0
  std::vector<BlockSequence> missing_witnesses;
  std::vector<BlockSequence> double_witnesses;
  std::vector<BlockSequence> extra_witnesses;

  bool ok() const { return missing == 0 && double_counted == 0 && extra == 0; }
};

nlohmann::json to_json(const ResummationReport& r);

/// Compares the multiset of sequences (length <= order) with chi_q = 1 against
/// the multiset generated by picking lambda in F_q and interleaving filler
/// steps allowed by `rule` before each lambda_p, followed by an arbitrary tail.
ResummationReport verify_resummation(const Thresholds& th, int q, int order,
                                     FillerRule rule = FillerRule::midpoint,
                                     std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace lightcone
