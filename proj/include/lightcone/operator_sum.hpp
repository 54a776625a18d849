#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "lightcone/pauli.hpp"

namespace lightcone {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;

/// Largest chain for which dense 2^n x 2^n matrices are built by default.
inline constexpr std::size_t kDefaultDenseCap = 12;

/**
 * @brief Sparse linear combination of Pauli strings.
 *
 * Keys are phase-free strings; any phase on an inserted string is folded into
 * its coefficient. Iteration order is the (deterministic) PauliString order.
 */
class OperatorSum {
 public:
  using TermMap = std::map<PauliString, Complex>;

  explicit OperatorSum(std::size_t n_sites, double drop_tolerance = 0.0);

  static OperatorSum identity(std::size_t n_sites);
  static OperatorSum term(Complex coefficient, const PauliString& s);

  std::size_t n_sites() const noexcept { return n_sites_; }
  double drop_tolerance() const noexcept { return drop_tolerance_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const TermMap& terms() const noexcept { return terms_; }

  /// Coefficient of the phase-free version of s (0 if absent).
  Complex coefficient(const PauliString& s) const;

  void add(Complex coefficient, const PauliString& s);

  OperatorSum& operator+=(const OperatorSum& other);
  OperatorSum& operator-=(const OperatorSum& other);
  OperatorSum& operator*=(Complex scale);

  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
  friend OperatorSum operator-(OperatorSum a, const OperatorSum& b) { return a -= b; }
  friend OperatorSum operator*(OperatorSum a, Complex s) { return a *= s; }
  friend OperatorSum operator*(Complex s, OperatorSum a) { return a *= s; }
  friend OperatorSum operator*(const OperatorSum& a, const OperatorSum& b);

  /// True when every coefficient is real, i.e. the operator is Hermitian.
  bool is_hermitian(double tolerance = 0.0) const;

  /// Sites on which at least one term acts non-trivially, ascending.
  std::vector<std::size_t> support() const;

  /// Same operator written on `sites.size()` sites, sites[k] -> k. Throws
  /// ArgumentError if a term acts outside `sites`.
  OperatorSum restricted(std::span<const std::size_t> sites) const;

  /// Sum of |coefficient|.
  double l1_norm() const;

 private:
  void check_compatible(const OperatorSum& other) const;

  std::size_t n_sites_;
  double drop_tolerance_;
  TermMap terms_;
};

OperatorSum commutator(const OperatorSum& a, const OperatorSum& b);

/// Dense 2^n x 2^n matrix; site 0 is the most significant tensor factor.
DenseMatrix dense_matrix(const OperatorSum& o,
                         std::size_t dense_cap = kDefaultDenseCap);

/// Dense matrix of a single Pauli string (phase included).
DenseMatrix dense_matrix(const PauliString& s,
                         std::size_t dense_cap = kDefaultDenseCap);

/// sqrt(tr(O^dagger O)/dim) = root-sum-square of Pauli coefficients.
double frobenius_norm(const OperatorSum& o);

/// Largest singular value.
double spectral_norm(const OperatorSum& o,
                     std::size_t dense_cap = kDefaultDenseCap);
double spectral_norm(const DenseMatrix& m);
/// Largest singular value by Lanczos on state vectors, for chains past the
/// dense cap (up to kernels::kMatrixFreeSiteCap sites).
double spectral_norm_matrix_free(const OperatorSum& o);

/// Expands a dense 2^n x 2^n matrix in Pauli strings, dropping coefficients
/// with magnitude <= drop.
OperatorSum pauli_decompose(const DenseMatrix& m, std::size_t n_sites,
                            double drop = 1e-14);

}  // namespace lightcone
