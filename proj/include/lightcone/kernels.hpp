#pragma once

// Data-parallel inner loops. Every OpenMP kernel has a serial counterpart kept
// as the reference implementation for tests and the benchmark.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "lightcone/operator_sum.hpp"

namespace lightcone::kernels {

/// A Pauli string as integer masks over basis-index bits, with i^(#Y) and the
/// string phase already folded into `coefficient`.
struct MaskedTerm {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  Complex coefficient;
};

std::vector<MaskedTerm> masked_terms(const OperatorSum& o);
MaskedTerm masked_term(const PauliString& s, Complex coefficient = 1.0);

DenseMatrix dense_from_terms_serial(std::span<const MaskedTerm> terms,
                                    std::size_t n_sites);
DenseMatrix dense_from_terms(std::span<const MaskedTerm> terms,
                             std::size_t n_sites);

/// Columns are the eigenvectors of a single-site Pauli, +1 first:
/// P = Q diag(+1, -1) Q^dagger.
Eigen::Matrix2cd probe_eigenbasis(Pauli p);

/// Inserts `bit` at position `pos` of `reduced`, shifting higher bits up.
std::size_t insert_bit(std::size_t reduced, std::size_t pos, std::size_t bit);

/// One (observable, probe) request for the commutator sweep.
struct ProbeRequest {
  std::size_t observable = 0;  // index into the evolved-observable list
  std::size_t site = 0;
  Pauli letter = Pauli::Z;
};

/// ||[A, P_site]|| for each request, by dense commutator and a full Hermitian
/// eigensolve. Serial reference.
std::vector<double> probe_commutator_norms_serial(
    std::span<const DenseMatrix> observables, std::size_t n_sites,
    std::span<const ProbeRequest> requests);

/// Same quantity via the off-diagonal block of A in the probe's eigenbasis:
/// ||[A, P]|| = 2 sigma_max(Pi_+ A Pi_-). Requests run in parallel.
std::vector<double> probe_commutator_norms(
    std::span<const DenseMatrix> observables, std::size_t n_sites,
    std::span<const ProbeRequest> requests);

/// Upper estimates u_k >= ||[A, P]|| that are exact norms whenever the norm
/// exceeds ceilings[k]; below it the Frobenius bound 2 ||Pi_+ A Pi_-||_F may
/// stand in. So u_k <= ceilings[k] exactly when the norm is.
std::vector<double> probe_commutator_certificates(
    std::span<const DenseMatrix> observables, std::size_t n_sites,
    std::span<const ProbeRequest> requests, std::span<const double> ceilings);

/// Columns spanning the +1 eigenspace of a single-site Pauli on `site`, as a
/// 2^n x 2^(n-1) isometry W with W W^dagger = (I + P) / 2.
DenseMatrix pauli_plus_frame(std::size_t n_sites, std::size_t site, Pauli letter);

/// G = Y_+^dagger Y_+ where Y_+ holds the components of the columns of `frame`
/// in the +1 eigenspace of the probe. Only the lower triangle is filled.
DenseMatrix probe_gram(const DenseMatrix& frame, std::size_t n_sites, std::size_t site,
                       Pauli letter);

/// For a projector Pi = Y Y^dagger and a probe P, ||[Pi, P]|| equals
/// 2 max_i sqrt(g_i (1 - g_i)) over the eigenvalues g_i of probe_gram.
/// Returns whether that norm reaches `threshold`, settling the clear cases
/// with sum_i g_i (1 - g_i) = tr G - ||G||_F^2 before any eigensolve.
bool projector_commutator_reaches(const DenseMatrix& gram_lower, double threshold);
double projector_commutator_norm(const DenseMatrix& gram_lower);

/// Largest singular value; dense SVD or Gram eigensolve up to 4096, Lanczos on M M^dagger
/// otherwise. Throws NumericError on non-convergence.
double largest_singular_value(const DenseMatrix& m);

/// Largest chain handled by the matrix-free norm; the Lanczos basis holds up to
/// a few hundred vectors of 2^n amplitudes.
inline constexpr std::size_t kMatrixFreeSiteCap = 16;

/// out = (sum of terms) v without forming the matrix.
void apply_terms_serial(std::span<const MaskedTerm> terms, const Eigen::VectorXcd& v,
                        Eigen::VectorXcd& out);
void apply_terms(std::span<const MaskedTerm> terms, const Eigen::VectorXcd& v,
                 Eigen::VectorXcd& out);

/// Operator norm of a sum of masked terms by Lanczos on H^dagger H, one
/// vector at a time. ResourceError above kMatrixFreeSiteCap sites.
double matrix_free_norm(std::span<const MaskedTerm> terms, std::size_t n_sites);

/// Number of worker threads honoured by the OpenMP kernels.
int worker_count();

}  // namespace lightcone::kernels
