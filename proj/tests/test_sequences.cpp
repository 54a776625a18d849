#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "lightcone/errors.hpp"
#include "lightcone/sequences.hpp"

using namespace lightcone;

namespace {

BlockSequence seq(std::initializer_list<std::pair<int, int>> steps) {
  BlockSequence s;
  for (auto [q, k] : steps) s.push_back({q, k});
  return s;
}

// Strictly increasing k-tuples at scale q, counted by brute force.
std::uint64_t brute_irreducible(int R, int q, int N) {
  const int w = 1 << (q - 1);
  std::vector<int> ks;
  for (int k = 0; w * (k + 2) <= R; ++k) ks.push_back(k);
  std::uint64_t count = 0;
  std::function<void(std::size_t, int)> rec = [&](std::size_t from, int left) {
    if (left == 0) {
      ++count;
      return;
    }
    for (std::size_t i = from; i < ks.size(); ++i) rec(i + 1, left - 1);
  };
  rec(0, N);
  return count;
}

// Interleavings of per-scale increasing tuples: every word over Z with the
// right letter multiplicities, times the per-scale tuple counts.
std::uint64_t brute_irreducible_z(int R, const std::map<int, int>& N) {
  std::vector<int> word;
  for (auto [q, n] : N) word.insert(word.end(), static_cast<std::size_t>(n), q);
  std::uint64_t words = 0;
  do ++words;
  while (std::next_permutation(word.begin(), word.end()));
  std::uint64_t product = 1;
  for (auto [q, n] : N) product *= brute_irreducible(R, q, n);
  return words * product;
}

// Records per scale, recomputed from scratch.
std::vector<int> oracle_forward(const BlockSequence& s, int q) {
  std::vector<int> out;
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (s[m].q != q) continue;
    bool record = true;
    for (std::size_t p = 0; p < m; ++p) record = record && s[p].right_edge() < s[m].right_edge();
    if (record) out.push_back(static_cast<int>(m));
  }
  return out;
}

BlockSequence random_sequence(std::mt19937_64& rng, int R, int len) {
  const auto labels = block_labels(R);
  std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
  BlockSequence s;
  for (int i = 0; i < len; ++i) s.push_back(labels[pick(rng)]);
  return s;
}

}  // namespace

TEST_CASE("creeping examples") {
  CHECK(is_creeping(seq({{1, 0}, {1, 1}, {1, 2}})));
  CHECK_FALSE(is_creeping(seq({{1, 0}, {1, 5}})));
  CHECK_FALSE(is_creeping(seq({{2, 1}})));
  CHECK(is_creeping({}));
  CHECK(is_creeping(seq({{2, 0}, {1, 3}})));
  CHECK_FALSE(is_creeping(seq({{2, 0}, {1, 4}})));
}

TEST_CASE("forward examples") {
  CHECK(is_forward(seq({{1, 0}, {1, 2}, {2, 2}}), 0, 8));
  CHECK(is_forward(seq({{3, 0}}), 0, 8));
  CHECK_FALSE(is_forward(seq({{1, 1}, {1, 0}}), 1, 2));
  CHECK_FALSE(is_forward(seq({{1, 0}, {1, 1}}), 0, 8));
  CHECK_FALSE(is_forward({}, 0, 0));
}

TEST_CASE("q-forward extraction examples") {
  const auto s = seq({{1, 0}, {2, 0}, {1, 2}, {2, 2}});
  CHECK(extract_q_forward(s, 2) == std::vector<int>{1, 3});
  CHECK(extract_q_forward(s, 3).empty());
  CHECK(extract_q_forward(seq({{2, 0}, {1, 0}}), 1).empty());
  CHECK(frontier(s) == 8);
  CHECK(frontier({}) == 1);
}

TEST_CASE("classification examples") {
  const auto th = long_thresholds(4.0, 8);
  REQUIRE(th.N == std::vector<int>{2, 1, 1});
  auto c = classify(seq({{1, 0}, {1, 1}}), th);
  CHECK(c.long_scales == std::vector<int>{1});
  CHECK(c.frontier == 3);
  CHECK(c.irreducible.at(1) == std::vector<int>{0, 1});
  CHECK(c.creeping);

  c = classify(seq({{3, 0}}), th);
  CHECK(c.long_scales == std::vector<int>{3});
  CHECK(c.frontier == 8);

  c = classify({}, th);
  CHECK(c.creeping);
  CHECK(c.long_scales.empty());
  CHECK(c.frontier == 1);

  CHECK_THROWS_AS(classify(seq({{3, 1}}), th), ArgumentError);
  CHECK_THROWS_AS(validate_sequence(seq({{4, 0}}), 8), ArgumentError);
}

TEST_CASE("extraction properties on random sequences") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 2000; ++trial) {
    const int R = 4 << (trial % 3);
    const auto s = random_sequence(rng, R, 1 + trial % 9);
    for (int q = 1; (1 << q) <= R; ++q) {
      const auto beta = extract_q_forward(s, q);
      REQUIRE(beta == oracle_forward(s, q));
      for (std::size_t i = 1; i < beta.size(); ++i) {
        REQUIRE(beta[i - 1] < beta[i]);
        REQUIRE(s[beta[i - 1]].right_edge() < s[beta[i]].right_edge());
      }
      auto extended = s;
      extended.push_back(random_sequence(rng, R, 1).front());
      const auto longer = extract_q_forward(extended, q);
      REQUIRE(longer.size() >= beta.size());
      REQUIRE(std::equal(beta.begin(), beta.end(), longer.begin()));
    }
  }
}

TEST_CASE("irreducible counts") {
  CHECK(count_irreducible(8, 1, 2, CountMode::closed_form) == 28);
  CHECK(count_irreducible(8, 1, 2, CountMode::exact) == 21);
  CHECK(count_irreducible(8, 3, 1, CountMode::closed_form) == 2);
  CHECK(count_irreducible(8, 3, 1, CountMode::exact) == 1);
  CHECK(count_irreducible(8, 2, 0, CountMode::exact) == 1);
  CHECK(count_irreducible(8, 2, 0, CountMode::closed_form) == 1);

  const auto th = long_thresholds(4.0, 8);
  CHECK(count_irreducible_z(8, {1, 2}, th, CountMode::exact) == 189);
  CHECK(count_irreducible_z(8, {1, 2}, th, CountMode::closed_form) == 336);
  CHECK(count_irreducible_z(8, {3}, th, CountMode::exact) == count_irreducible(8, 3, 1, CountMode::exact));

  CHECK(binomial(67, 33) == 14226520737620288370ull);
  CHECK_THROWS_AS(binomial(70, 35), ResourceError);
  CHECK(binomial(5, 7) == 0);
}

TEST_CASE("exact counts match brute force") {
  for (int R : {4, 8, 16})
    for (int q = 1; (1 << q) <= R; ++q)
      for (int N = 0; N <= 3; ++N) {
        const auto brute = brute_irreducible(R, q, N);
        REQUIRE(count_irreducible(R, q, N, CountMode::exact) == brute);
        REQUIRE(enumerate_irreducible(R, q, N) == brute);
        REQUIRE(count_irreducible(R, q, N, CountMode::closed_form) >= brute);
      }
}

TEST_CASE("woven counts match brute force") {
  for (int R : {4, 8, 16}) {
    const int n_star = exact_log2(R);
    for (int q1 = 1; q1 <= n_star; ++q1)
      for (int q2 = q1 + 1; q2 <= n_star; ++q2)
        for (int N1 = 1; N1 <= 3; ++N1)
          for (int N2 = 1; N2 <= 3; ++N2) {
            const std::map<int, int> N{{q1, N1}, {q2, N2}};
            REQUIRE(enumerate_irreducible_z(R, N) == brute_irreducible_z(R, N));
          }
    for (double ap : {2.0, 3.0, 4.0}) {
      const auto th = long_thresholds(ap, R);
      for (int q1 = 1; q1 <= n_star; ++q1)
        for (int q2 = q1; q2 <= n_star; ++q2) {
          std::vector<int> Z{q1};
          if (q2 != q1) Z.push_back(q2);
          std::map<int, int> N;
          bool small = true;
          for (int q : Z) {
            N[q] = th.N_of(q);
            small = small && th.N_of(q) <= 3;
          }
          if (!small) continue;
          const auto exact = count_irreducible_z(R, Z, th, CountMode::exact);
          REQUIRE(exact == brute_irreducible_z(R, N));
          REQUIRE(count_irreducible_z(R, Z, th, CountMode::closed_form) >= exact);
        }
    }
  }
}

TEST_CASE("sequence space size") {
  CHECK(sequence_space_size(4, 0) == 1);
  CHECK(sequence_space_size(4, 2) == 21);
  CHECK(sequence_space_size(11, 3) == 1 + 11 + 121 + 1331);
}

TEST_CASE("coverage holds exhaustively") {
  for (double ap : {2.0, 4.0}) {
    const auto r4 = verify_coverage(long_thresholds(ap, 4), 5);
    CHECK(r4.checked == sequence_space_size(4, 5));
    CHECK(r4.creeping_frontier > 0);
    CHECK(r4.multiplicity_checked > 0);
    CHECK(r4.coverage_violations == 0);
    CHECK(r4.multiplicity_violations == 0);
    CHECK(r4.ok());
  }
  const auto r8 = verify_coverage(long_thresholds(4.0, 8), 5);
  CHECK(r8.checked == sequence_space_size(11, 5));
  CHECK(r8.ok());
}

TEST_CASE("coverage counterexamples appear with doubled thresholds") {
  auto th = long_thresholds(4.0, 4);
  for (auto& n : th.N) n *= 2;
  const auto report = verify_coverage(th, 5);
  CHECK(report.coverage_violations > 0);
  CHECK_FALSE(report.ok());
  REQUIRE_FALSE(report.counterexamples.empty());
  const auto& witness = report.counterexamples.front();
  CHECK(witness.kind == "coverage");
  CHECK(is_creeping(witness.sequence));
  CHECK(frontier(witness.sequence) == 4);
  CHECK(classify(witness.sequence, th).long_scales.empty());
  CHECK(report.multiplicity_violations == 0);
}

TEST_CASE("serial and parallel coverage agree") {
  const auto th = long_thresholds(2.0, 8);
  const auto a = verify_coverage(th, 4);
  const auto b = verify_coverage_serial(th, 4);
  CHECK(a.checked == b.checked);
  CHECK(a.creeping_frontier == b.creeping_frontier);
  CHECK(a.multiplicity_checked == b.multiplicity_checked);
  CHECK(a.coverage_violations == b.coverage_violations);
}

TEST_CASE("coverage budget") {
  CHECK_THROWS_AS(verify_coverage(long_thresholds(4.0, 8), 6, 1000), ResourceError);
}

TEST_CASE("resummation with every filler allowed overcounts") {
  const auto th = long_thresholds(4.0, 4);
  const auto report = verify_resummation(th, 1, 4, FillerRule::unrestricted);
  CHECK_FALSE(report.ok());
  CHECK(report.double_counted > 0);
  REQUIRE_FALSE(report.double_witnesses.empty());
  CHECK(classify(report.double_witnesses.front(), th).long_scales.size() >= 1);
}

TEST_CASE("resummation sizes are consistent") {
  const auto th = long_thresholds(4.0, 4);
  for (auto rule : {FillerRule::midpoint, FillerRule::unrestricted, FillerRule::record_preserving})
    for (int q : {1, 2}) {
      const auto r = verify_resummation(th, q, 3, rule);
      // Every left-side sequence is either generated or missing.
      CHECK(r.lhs_size >= r.missing);
      CHECK(r.rhs_size + r.missing >= r.lhs_size);
      CHECK(r.N_q == th.N_of(q));
    }
}

TEST_CASE("string conversions") {
  CHECK(to_string(seq({{1, 0}, {2, 1}})) == "[(1,0),(2,1)]");
  CHECK(to_json(seq({{1, 0}})).dump() == "[[1,0]]");
  CHECK(count_mode_from_string("exact") == CountMode::exact);
  CHECK(filler_rule_from_string("midpoint") == FillerRule::midpoint);
  CHECK_THROWS_AS(count_mode_from_string("loose"), ArgumentError);
  CHECK_THROWS_AS(filler_rule_from_string("loose"), ArgumentError);
}
