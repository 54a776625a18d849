#include "lightcone/lattice.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "lightcone/decomposition.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/kernels.hpp"

namespace lightcone {

std::string to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::ising_lr: return "ising_lr";
    case ModelFamily::xx_lr: return "xx_lr";
    case ModelFamily::random_sign_xx: return "random_sign_xx";
  }
  throw ArgumentError("unknown model family");
}

ModelFamily model_family_from_string(std::string_view name) {
  if (name == "ising_lr") return ModelFamily::ising_lr;
  if (name == "xx_lr") return ModelFamily::xx_lr;
  if (name == "random_sign_xx") return ModelFamily::random_sign_xx;
  throw ArgumentError(fmt::format("unknown model family '{}'", name));
}

void ModelSpec::validate() const {
  if (n_sites < 2) throw ArgumentError("n_sites must be at least 2");
  if (n_sites > 63) throw ArgumentError("n_sites must be at most 63");
  if (!(alpha > 2.0) || !std::isfinite(alpha))
    throw DomainError(fmt::format("alpha must exceed 2 (got {})", alpha));
  if (!(h > 0.0) || !std::isfinite(h))
    throw DomainError(fmt::format("h must be positive (got {})", h));
  if (!std::isfinite(onsite_x) || !std::isfinite(onsite_z))
    throw ArgumentError("on-site fields must be finite");
}

std::string ModelSpec::tag() const {
  std::string t = fmt::format("{}_n{}_a{}", to_string(family), n_sites, alpha);
  if (family == ModelFamily::random_sign_xx) t += fmt::format("_s{}", seed);
  return t;
}

void to_json(nlohmann::json& j, const ModelSpec& spec) {
  j = nlohmann::json{{"family", to_string(spec.family)},
                     {"n_sites", spec.n_sites},
                     {"alpha", spec.alpha},
                     {"h", spec.h},
                     {"onsite_x", spec.onsite_x},
                     {"onsite_z", spec.onsite_z},
                     {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, ModelSpec& spec) {
  ModelSpec out;
  if (j.contains("family"))
    out.family = model_family_from_string(j.at("family").get<std::string>());
  if (j.contains("n_sites")) j.at("n_sites").get_to(out.n_sites);
  if (j.contains("alpha")) j.at("alpha").get_to(out.alpha);
  if (j.contains("h")) j.at("h").get_to(out.h);
  if (j.contains("onsite_x")) j.at("onsite_x").get_to(out.onsite_x);
  if (j.contains("onsite_z")) j.at("onsite_z").get_to(out.onsite_z);
  if (j.contains("seed")) j.at("seed").get_to(out.seed);
  spec = out;
}

OperatorSum CouplingSet::hamiltonian() const {
  OperatorSum h = two_local_part();
  for (const auto& [site, term] : onsite_terms) h += term;
  return h;
}

OperatorSum CouplingSet::two_local_part() const {
  OperatorSum h(static_cast<std::size_t>(spec.n_sites));
  for (const auto& [pair, term] : pair_terms) h += term;
  return h;
}

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int pair_sign(std::uint64_t seed, int n_sites, int i, int j) {
  const auto index = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n_sites) +
                     static_cast<std::uint64_t>(j);
  return (splitmix64(seed ^ index) >> 63) ? -1 : 1;
}

CouplingSet build_model(const ModelSpec& spec) {
  spec.validate();
  CouplingSet cs;
  cs.spec = spec;
  const auto n = static_cast<std::size_t>(spec.n_sites);

  for (int i = 0; i < spec.n_sites; ++i) {
    for (int j = i + 1; j < spec.n_sites; ++j) {
      const double c = spec.h / std::pow(static_cast<double>(j - i), spec.alpha);
      const auto si = static_cast<std::size_t>(i);
      const auto sj = static_cast<std::size_t>(j);
      OperatorSum term(n);
      switch (spec.family) {
        case ModelFamily::ising_lr:
          term.add(c, PauliString::two_site(n, si, Pauli::Z, sj, Pauli::Z));
          break;
        case ModelFamily::xx_lr:
        case ModelFamily::random_sign_xx: {
          const double s = spec.family == ModelFamily::random_sign_xx
                               ? pair_sign(spec.seed, spec.n_sites, i, j)
                               : 1.0;
          term.add(0.5 * s * c, PauliString::two_site(n, si, Pauli::X, sj, Pauli::X));
          term.add(0.5 * s * c, PauliString::two_site(n, si, Pauli::Y, sj, Pauli::Y));
          break;
        }
      }
      cs.pair_terms.emplace(SitePair{i, j}, std::move(term));
    }
  }

  for (int i = 0; i < spec.n_sites; ++i) {
    const auto si = static_cast<std::size_t>(i);
    OperatorSum term(n);
    if (spec.onsite_x != 0.0) term.add(spec.onsite_x, PauliString::single(n, si, Pauli::X));
    if (spec.onsite_z != 0.0) term.add(spec.onsite_z, PauliString::single(n, si, Pauli::Z));
    cs.onsite_terms.emplace(i, std::move(term));
  }
  return cs;
}

DecayReport verify_decay(const CouplingSet& cs, double tolerance) {
  DecayReport report;
  for (const auto& [pair, term] : cs.pair_terms) {
    const auto [i, j] = pair;
    const std::size_t sites[2] = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
    const double norm = spectral_norm(term.restricted(sites));
    const double cap = cs.spec.h / std::pow(static_cast<double>(j - i), cs.spec.alpha);
    if (norm > cap + tolerance) report.violators.push_back(pair);
  }
  report.ok = report.violators.empty();
  return report;
}

FrustrationReport frustration_ratio(const CouplingSet& cs,
                                    const Decomposition& decomposition,
                                    std::size_t dense_cap) {
  (void)cs;
  FrustrationReport report;
  report.k_est = std::numeric_limits<double>::infinity();
  for (const auto& block : decomposition.blocks) {
    if (!block.op || block.op->empty()) continue;
    const auto support = block.op->support();
    if (support.size() > std::max(dense_cap, kernels::kMatrixFreeSiteCap))
      throw ResourceError(fmt::format("block {} acts on {} sites, above the cap {}",
                                      to_string(block.label), support.size(),
                                      std::max(dense_cap, kernels::kMatrixFreeSiteCap)));
    BlockFrustration rec;
    rec.q = block.label.q;
    rec.k = block.label.k;
    rec.frobenius = frobenius_norm(*block.op);
    const OperatorSum local = block.op->restricted(support);
    rec.spectral = support.size() <= dense_cap ? spectral_norm(local, dense_cap)
                                               : spectral_norm_matrix_free(local);
    rec.ratio = rec.frobenius / rec.spectral;
    report.k_est = std::min(report.k_est, rec.ratio);
    report.blocks.push_back(rec);
  }
  if (report.blocks.empty()) report.k_est = 1.0;
  return report;
}

}  // namespace lightcone
