#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lightcone/operator_sum.hpp"

namespace lightcone {

enum class ModelFamily { ising_lr, xx_lr, random_sign_xx };

std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(std::string_view name);

/// A power-law 2-local chain: pair terms scale as h/|i-j|^alpha.
struct ModelSpec {
  ModelFamily family = ModelFamily::ising_lr;
  int n_sites = 2;
  double alpha = 3.0;
  double h = 1.0;
  double onsite_x = 1.0;
  double onsite_z = 0.5;
  std::uint64_t seed = 0;

  /// Throws ArgumentError/DomainError unless n_sites >= 2, alpha > 2, h > 0.
  void validate() const;
  std::string tag() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

void to_json(nlohmann::json& j, const ModelSpec& spec);
void from_json(const nlohmann::json& j, ModelSpec& spec);

using SitePair = std::pair<int, int>;

/// Realised couplings of one model instance. Every operator lives on the full
/// chain of spec.n_sites sites.
struct CouplingSet {
  ModelSpec spec;
  std::map<SitePair, OperatorSum> pair_terms;  // keys (i, j) with i < j
  std::map<int, OperatorSum> onsite_terms;

  int n_sites() const { return spec.n_sites; }
  OperatorSum hamiltonian() const;
  OperatorSum two_local_part() const;
};

/// splitmix64 output for one state value.
std::uint64_t splitmix64(std::uint64_t state);

/// +1 or -1 for the pair (i, j) of a random_sign_xx chain: the top bit of
/// splitmix64(seed ^ (i * n_sites + j)).
int pair_sign(std::uint64_t seed, int n_sites, int i, int j);

CouplingSet build_model(const ModelSpec& spec);

struct DecayReport {
  bool ok = true;
  std::vector<SitePair> violators;
};

/// Checks ||H_ij|| <= h/|i-j|^alpha + tolerance for every pair term.
DecayReport verify_decay(const CouplingSet& cs, double tolerance = 1e-12);

struct Decomposition;

struct BlockFrustration {
  int q = 0;
  int k = 0;
  double spectral = 0.0;
  double frobenius = 0.0;
  double ratio = 0.0;
};

struct FrustrationReport {
  std::vector<BlockFrustration> blocks;  // blocks with a zero operator are skipped
  double k_est = 1.0;
};

/// frobenius/spectral for every block operator of a decomposition built from
/// `cs`. Spectral norms are taken on each block's support: dense up to
/// dense_cap sites, matrix-free Lanczos beyond. ResourceError past both caps.
FrustrationReport frustration_ratio(const CouplingSet& cs,
                                    const Decomposition& decomposition,
                                    std::size_t dense_cap = kDefaultDenseCap);

}  // namespace lightcone
