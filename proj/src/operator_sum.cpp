#include "lightcone/operator_sum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "lightcone/errors.hpp"
#include "lightcone/kernels.hpp"

namespace lightcone {

namespace {

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_dense_cap(std::size_t n_sites, std::size_t dense_cap) {
  if (n_sites > dense_cap) {
    throw ResourceError("dense matrix for " + std::to_string(n_sites) +
                        " sites exceeds the dense cap of " +
                        std::to_string(dense_cap) + " sites");
  }
}

}  // namespace

OperatorSum::OperatorSum(std::size_t n_sites, double drop_tolerance)
    : n_sites_(n_sites), drop_tolerance_(drop_tolerance) {
  if (n_sites == 0) throw ArgumentError("operator needs at least one site");
  if (drop_tolerance < 0.0) throw ArgumentError("negative drop tolerance");
}

OperatorSum OperatorSum::identity(std::size_t n_sites) {
  OperatorSum o(n_sites);
  o.add(1.0, PauliString(n_sites));
  return o;
}

OperatorSum OperatorSum::term(Complex coefficient, const PauliString& s) {
  OperatorSum o(s.n_sites());
  o.add(coefficient, s);
  return o;
}

Complex OperatorSum::coefficient(const PauliString& s) const {
  auto it = terms_.find(s.unphased());
  return it == terms_.end() ? Complex{} : it->second;
}

void OperatorSum::add(Complex coefficient, const PauliString& s) {
  if (s.n_sites() != n_sites_) {
    throw ArgumentError("term has " + std::to_string(s.n_sites()) +
                        " sites, operator has " + std::to_string(n_sites_));
  }
  coefficient *= i_power(s.phase_exp());
  auto [it, inserted] = terms_.try_emplace(s.unphased(), Complex{});
  it->second += coefficient;
  const double mag = std::abs(it->second);
  if (mag == 0.0 || (drop_tolerance_ > 0.0 && mag < drop_tolerance_)) {
    terms_.erase(it);
  }
}

void OperatorSum::check_compatible(const OperatorSum& other) const {
  if (other.n_sites_ != n_sites_) {
    throw ArgumentError("operator size mismatch: " + std::to_string(n_sites_) +
                        " vs " + std::to_string(other.n_sites_));
  }
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  check_compatible(other);
  for (const auto& [s, c] : other.terms_) add(c, s);
  return *this;
}

OperatorSum& OperatorSum::operator-=(const OperatorSum& other) {
  check_compatible(other);
  for (const auto& [s, c] : other.terms_) add(-c, s);
  return *this;
}

OperatorSum& OperatorSum::operator*=(Complex scale) {
  if (scale == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= scale;
    const double mag = std::abs(it->second);
    if (mag == 0.0 || (drop_tolerance_ > 0.0 && mag < drop_tolerance_)) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

OperatorSum operator*(const OperatorSum& a, const OperatorSum& b) {
  a.check_compatible(b);
  OperatorSum out(a.n_sites_, std::max(a.drop_tolerance_, b.drop_tolerance_));
  for (const auto& [sa, ca] : a.terms_) {
    for (const auto& [sb, cb] : b.terms_) out.add(ca * cb, sa * sb);
  }
  return out;
}

bool OperatorSum::is_hermitian(double tolerance) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const auto& kv) {
    return std::abs(kv.second.imag()) <= tolerance;
  });
}

std::vector<std::size_t> OperatorSum::support() const {
  std::vector<bool> used(n_sites_, false);
  for (const auto& [s, c] : terms_) {
    for (auto site : s.support()) used[site] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t site = 0; site < n_sites_; ++site) {
    if (used[site]) out.push_back(site);
  }
  return out;
}

OperatorSum OperatorSum::restricted(std::span<const std::size_t> sites) const {
  std::vector<int> position(n_sites_, -1);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] >= n_sites_) {
      throw ArgumentError("restriction site " + std::to_string(sites[k]) +
                          " out of range");
    }
    position[sites[k]] = static_cast<int>(k);
  }
  OperatorSum out(std::max<std::size_t>(sites.size(), 1), drop_tolerance_);
  for (const auto& [s, c] : terms_) {
    PauliString r(out.n_sites());
    for (auto site : s.support()) {
      if (position[site] < 0) {
        throw ArgumentError("term " + s.to_string() + " acts on site " +
                            std::to_string(site) + " outside the restriction");
      }
      r.set_letter(static_cast<std::size_t>(position[site]), s.letter(site));
    }
    out.add(c, r);
  }
  return out;
}

double OperatorSum::l1_norm() const {
  double total = 0.0;
  for (const auto& [s, c] : terms_) total += std::abs(c);
  return total;
}

OperatorSum commutator(const OperatorSum& a, const OperatorSum& b) {
  return a * b - b * a;
}

DenseMatrix dense_matrix(const OperatorSum& o, std::size_t dense_cap) {
  check_dense_cap(o.n_sites(), dense_cap);
  const auto terms = kernels::masked_terms(o);
  return kernels::dense_from_terms(terms, o.n_sites());
}

DenseMatrix dense_matrix(const PauliString& s, std::size_t dense_cap) {
  check_dense_cap(s.n_sites(), dense_cap);
  const kernels::MaskedTerm term = kernels::masked_term(s);
  return kernels::dense_from_terms(std::span(&term, 1), s.n_sites());
}

double frobenius_norm(const OperatorSum& o) {
  double sum = 0.0;
  for (const auto& [s, c] : o.terms()) sum += std::norm(c);
  return std::sqrt(sum);
}

namespace {
constexpr Eigen::Index kIterativeNormThreshold = 512;
}  // namespace

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  // Full decompositions of 2^10 and larger are slow; iterate instead.
  if (std::max(m.rows(), m.cols()) > kIterativeNormThreshold) {
    return kernels::largest_singular_value(m);
  }
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericError(
          "Hermitian eigensolver did not converge within its iteration limit "
          "of " + std::to_string(30 * m.rows()) + " sweeps");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<DenseMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const OperatorSum& o, std::size_t dense_cap) {
  if (o.empty()) return 0.0;
  return spectral_norm(dense_matrix(o, dense_cap));
}

double spectral_norm_matrix_free(const OperatorSum& o) {
  if (o.empty()) return 0.0;
  return kernels::matrix_free_norm(kernels::masked_terms(o), o.n_sites());
}

OperatorSum pauli_decompose(const DenseMatrix& m, std::size_t n_sites,
                            double drop) {
  const std::size_t dim = std::size_t{1} << n_sites;
  if (static_cast<std::size_t>(m.rows()) != dim ||
      static_cast<std::size_t>(m.cols()) != dim) {
    throw ArgumentError("matrix is not 2^n x 2^n for n = " +
                        std::to_string(n_sites));
  }
  OperatorSum out(n_sites);
  std::vector<Complex> f(dim);
  for (std::size_t xm = 0; xm < dim; ++xm) {
    for (std::size_t b = 0; b < dim; ++b) f[b] = m(b ^ xm, b);
    // Walsh-Hadamard transform over the z mask.
    for (std::size_t len = 1; len < dim; len <<= 1) {
      for (std::size_t i = 0; i < dim; i += 2 * len) {
        for (std::size_t j = i; j < i + len; ++j) {
          const Complex u = f[j], v = f[j + len];
          f[j] = u + v;
          f[j + len] = u - v;
        }
      }
    }
    for (std::size_t zm = 0; zm < dim; ++zm) {
      const int ny = std::popcount(xm & zm);
      const Complex c = f[zm] * i_power(-ny) / static_cast<double>(dim);
      if (std::abs(c) <= drop) continue;
      PauliString s(n_sites);
      for (std::size_t site = 0; site < n_sites; ++site) {
        const std::size_t bit = std::size_t{1} << (n_sites - 1 - site);
        const bool x = xm & bit, z = zm & bit;
        s.set_letter(site, x ? (z ? Pauli::Y : Pauli::X)
                             : (z ? Pauli::Z : Pauli::I));
      }
      out.add(c, s);
    }
  }
  return out;
}

}  // namespace lightcone
