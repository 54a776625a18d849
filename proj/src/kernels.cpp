#include "lightcone/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <string>

#include "lightcone/errors.hpp"

namespace lightcone::kernels {

namespace {

Complex i_power(std::size_t k) {
  static constexpr Complex kTable[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kTable[k % 4];
}

void check_masks(std::size_t n_sites) {
  if (n_sites >= 63) {
    throw ResourceError("integer basis masks support at most 62 sites");
  }
}

// Column b of a masked Pauli term has its single entry at row b ^ x_mask.
void accumulate_column(std::span<const MaskedTerm> terms, std::size_t b,
                       DenseMatrix& out) {
  for (const auto& t : terms) {
    const double sign = (std::popcount(b & t.z_mask) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(b ^ t.x_mask), static_cast<Eigen::Index>(b)) +=
        sign * t.coefficient;
  }
}

// Block (row_bit, col_bit) of Q^dagger A Q on the probed site.
DenseMatrix probe_block(const DenseMatrix& a, std::size_t n_sites,
                        std::size_t site, Pauli letter, std::size_t row_bit,
                        std::size_t col_bit) {
  const Eigen::Matrix2cd q = probe_eigenbasis(letter);
  const std::size_t half = std::size_t{1} << (n_sites - 1);
  const std::size_t pos = n_sites - 1 - site;
  DenseMatrix block = DenseMatrix::Zero(static_cast<Eigen::Index>(half),
                                        static_cast<Eigen::Index>(half));
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t d = 0; d < 2; ++d) {
      const Complex w = std::conj(q(c, row_bit)) * q(d, col_bit);
      if (w == Complex{}) continue;
      for (std::size_t j = 0; j < half; ++j) {
        const auto col = static_cast<Eigen::Index>(insert_bit(j, pos, d));
        for (std::size_t i = 0; i < half; ++i) {
          block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
              w * a(static_cast<Eigen::Index>(insert_bit(i, pos, c)), col);
        }
      }
    }
  }
  return block;
}

void check_request(std::span<const DenseMatrix> observables,
                   std::size_t n_sites, const ProbeRequest& r) {
  if (r.observable >= observables.size()) {
    throw ArgumentError("probe request names a missing observable");
  }
  if (r.site >= n_sites) {
    throw ArgumentError("probe site " + std::to_string(r.site) +
                        " out of range");
  }
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_sites);
  const auto& a = observables[r.observable];
  if (a.rows() != dim || a.cols() != dim) {
    throw ArgumentError("observable dimension does not match 2^n");
  }
}

constexpr Eigen::Index kDenseSvdLimit = 256;
constexpr Eigen::Index kDenseGramLimit = 4096;
constexpr int kLanczosMaxIterations = 400;
constexpr std::size_t kStagnationWindow = 10;
// Residual bound relative to the Ritz value; |theta - lambda| <= residual.
constexpr double kLanczosTolerance = 1e-11;

}  // namespace

Eigen::Matrix2cd probe_eigenbasis(Pauli p) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd q;
  switch (p) {
    case Pauli::X:
      q << s, s, s, -s;
      break;
    case Pauli::Y:
      q << Complex(s, 0), Complex(s, 0), Complex(0, s), Complex(0, -s);
      break;
    case Pauli::Z:
      q.setIdentity();
      break;
    case Pauli::I:
      throw ArgumentError("identity probe has a vanishing commutator");
  }
  return q;
}

std::size_t insert_bit(std::size_t reduced, std::size_t pos, std::size_t bit) {
  const std::size_t low = reduced & ((std::size_t{1} << pos) - 1);
  return ((reduced >> pos) << (pos + 1)) | (bit << pos) | low;
}

MaskedTerm masked_term(const PauliString& s, Complex coefficient) {
  const std::size_t n = s.n_sites();
  check_masks(n);
  MaskedTerm t;
  for (std::size_t site = 0; site < n; ++site) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - site);
    const Pauli p = s.letter(site);
    if (p == Pauli::X || p == Pauli::Y) t.x_mask |= bit;
    if (p == Pauli::Z || p == Pauli::Y) t.z_mask |= bit;
  }
  t.coefficient =
      coefficient * i_power(static_cast<std::size_t>(s.phase_exp()) + s.y_count());
  return t;
}

std::vector<MaskedTerm> masked_terms(const OperatorSum& o) {
  std::vector<MaskedTerm> out;
  out.reserve(o.size());
  for (const auto& [s, c] : o.terms()) out.push_back(masked_term(s, c));
  return out;
}

DenseMatrix dense_from_terms_serial(std::span<const MaskedTerm> terms,
                                    std::size_t n_sites) {
  check_masks(n_sites);
  const std::size_t dim = std::size_t{1} << n_sites;
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(dim),
                                      static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) accumulate_column(terms, b, out);
  return out;
}

DenseMatrix dense_from_terms(std::span<const MaskedTerm> terms,
                             std::size_t n_sites) {
  check_masks(n_sites);
  const std::size_t dim = std::size_t{1} << n_sites;
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(dim),
                                      static_cast<Eigen::Index>(dim));
  const auto count = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < count; ++b) {
    accumulate_column(terms, static_cast<std::size_t>(b), out);
  }
  return out;
}

namespace {

// Largest eigenvalue of a positive semidefinite operator by Lanczos with full
// reorthogonalisation; returns its square root.
double lanczos_sqrt_top(Eigen::Index dim,
                        const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                        const char* what) {
  const int max_iter =
      static_cast<int>(std::min<Eigen::Index>(dim, kLanczosMaxIterations));
  // Grown on demand: matrix-free callers have long vectors.
  DenseMatrix basis(dim, std::min(max_iter + 1, 64));
  std::vector<double> alpha, beta;

  std::uint64_t state = 0x2545F4914F6CDD1DULL;
  auto next_uniform = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
  };
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(next_uniform(), next_uniform());
  basis.col(0) = v.normalized();

  double estimate = 0.0;
  std::vector<double> history;
  for (int k = 0; k < max_iter; ++k) {
    Eigen::VectorXcd w = apply(basis.col(k));
    const double a = basis.col(k).dot(w).real();
    alpha.push_back(a);
    w -= a * basis.col(k);
    if (k > 0) w -= beta.back() * basis.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const auto prev = basis.leftCols(k + 1);
      w -= prev * (prev.adjoint() * w);
    }
    const double b = w.norm();

    const int size = k + 1;
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), size);
    Eigen::VectorXd sub = size > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), size - 1))
                                   : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    estimate = es.eigenvalues()(size - 1);
    const double residual = b * std::abs(es.eigenvectors()(size - 1, size - 1));
    if (estimate <= 0.0 && b == 0.0) return 0.0;
    if (residual <= kLanczosTolerance * std::max(estimate, 1e-300) ||
        b <= 1e-14 * std::max(estimate, 1e-300)) {
      return std::sqrt(std::max(estimate, 0.0));
    }
    // Inside a tight cluster the Ritz vector wanders while the top Ritz value,
    // nondecreasing in k, has already settled.
    history.push_back(estimate);
    if (history.size() > kStagnationWindow &&
        estimate - history[history.size() - 1 - kStagnationWindow] <= 1e-15 * estimate) {
      return std::sqrt(std::max(estimate, 0.0));
    }
    beta.push_back(b);
    if (basis.cols() < k + 2)
      basis.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(2 * basis.cols(), max_iter + 1));
    basis.col(k + 1) = w / b;
  }
  throw NumericError(std::string("Lanczos estimate of ") + what +
                     " did not converge after " + std::to_string(max_iter) +
                     " iterations (last estimate " +
                     std::to_string(std::sqrt(std::max(estimate, 0.0))) + ")");
}

}  // namespace

DenseMatrix pauli_plus_frame(std::size_t n_sites, std::size_t site, Pauli letter) {
  if (site >= n_sites) throw ArgumentError("frame site " + std::to_string(site) + " out of range");
  check_masks(n_sites);
  const Eigen::Matrix2cd q = probe_eigenbasis(letter);
  const std::size_t half = std::size_t{1} << (n_sites - 1);
  const std::size_t pos = n_sites - 1 - site;
  DenseMatrix w = DenseMatrix::Zero(static_cast<Eigen::Index>(2 * half), static_cast<Eigen::Index>(half));
  for (std::size_t j = 0; j < half; ++j)
    for (std::size_t c = 0; c < 2; ++c)
      w(static_cast<Eigen::Index>(insert_bit(j, pos, c)), static_cast<Eigen::Index>(j)) = q(c, 0);
  return w;
}

DenseMatrix probe_gram(const DenseMatrix& frame, std::size_t n_sites, std::size_t site,
                       Pauli letter) {
  if (site >= n_sites) throw ArgumentError("probe site " + std::to_string(site) + " out of range");
  const std::size_t half = std::size_t{1} << (n_sites - 1);
  if (frame.rows() != static_cast<Eigen::Index>(2 * half))
    throw ArgumentError("frame dimension does not match 2^n");
  const Eigen::Matrix2cd q = probe_eigenbasis(letter);
  const std::size_t pos = n_sites - 1 - site;
  DenseMatrix plus = DenseMatrix::Zero(static_cast<Eigen::Index>(half), frame.cols());
  for (std::size_t d = 0; d < 2; ++d) {
    const Complex w = std::conj(q(d, 0));
    if (w == Complex{}) continue;
    for (std::size_t i = 0; i < half; ++i)
      plus.row(static_cast<Eigen::Index>(i)) += w * frame.row(static_cast<Eigen::Index>(insert_bit(i, pos, d)));
  }
  DenseMatrix gram = DenseMatrix::Zero(frame.cols(), frame.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(plus.adjoint());
  return gram;
}

namespace {

double max_spread(const DenseMatrix& gram_lower) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram_lower, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("Gram eigensolver did not converge");
  double best = 0.0;
  for (double g : es.eigenvalues()) best = std::max(best, g * (1.0 - g));
  return best;
}

}  // namespace

double projector_commutator_norm(const DenseMatrix& gram_lower) {
  return 2.0 * std::sqrt(max_spread(gram_lower));
}

bool projector_commutator_reaches(const DenseMatrix& gram_lower, double threshold) {
  const double target = 0.25 * threshold * threshold;
  double trace = 0.0;
  double frob = 0.0;
  for (Eigen::Index j = 0; j < gram_lower.cols(); ++j) {
    const double d = gram_lower(j, j).real();
    trace += d;
    frob += d * d;
    if (j + 1 < gram_lower.rows())
      frob += 2.0 * gram_lower.col(j).tail(gram_lower.rows() - j - 1).squaredNorm();
  }
  // The sum bounds the largest term; the margin covers rounding in tr - ||.||^2.
  const double margin = 1e-12 * std::max(1.0, trace);
  if (trace - frob + margin < target) return false;
  return max_spread(gram_lower) >= target;
}

double largest_singular_value(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (std::max(m.rows(), m.cols()) <= kDenseSvdLimit) {
    Eigen::BDCSVD<DenseMatrix> svd(m);
    return svd.singularValues()(0);
  }
  // Commutator blocks have tightly clustered top singular values, where
  // Krylov methods crawl; a dense Gram eigensolve is cheaper up to this size.
  if (std::max(m.rows(), m.cols()) <= kDenseGramLimit) {
    const DenseMatrix gram = m.rows() <= m.cols() ? DenseMatrix(m * m.adjoint()) : DenseMatrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("Gram eigensolver did not converge");
    return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  }
  return lanczos_sqrt_top(
      m.rows(),
      [&m](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return m * (m.adjoint() * x); },
      "the largest singular value");
}

void apply_terms_serial(std::span<const MaskedTerm> terms, const Eigen::VectorXcd& v,
                        Eigen::VectorXcd& out) {
  out.setZero(v.size());
  const auto dim = static_cast<std::size_t>(v.size());
  for (std::size_t i = 0; i < dim; ++i) {
    for (const auto& t : terms) {
      const std::size_t src = i ^ t.x_mask;
      const double sign = (std::popcount(src & t.z_mask) & 1) ? -1.0 : 1.0;
      out(static_cast<Eigen::Index>(i)) += sign * t.coefficient * v(static_cast<Eigen::Index>(src));
    }
  }
}

void apply_terms(std::span<const MaskedTerm> terms, const Eigen::VectorXcd& v,
                 Eigen::VectorXcd& out) {
  out.setZero(v.size());
  const auto count = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < count; ++row) {
    const auto i = static_cast<std::size_t>(row);
    Complex acc{};
    for (const auto& t : terms) {
      const std::size_t src = i ^ t.x_mask;
      const double sign = (std::popcount(src & t.z_mask) & 1) ? -1.0 : 1.0;
      acc += sign * t.coefficient * v(static_cast<Eigen::Index>(src));
    }
    out(row) = acc;
  }
}

double matrix_free_norm(std::span<const MaskedTerm> terms, std::size_t n_sites) {
  check_masks(n_sites);
  if (n_sites > kMatrixFreeSiteCap) {
    throw ResourceError("matrix-free norm supports at most " +
                        std::to_string(kMatrixFreeSiteCap) + " sites (got " +
                        std::to_string(n_sites) + ")");
  }
  if (terms.empty()) return 0.0;
  // (c X^x Z^z)^dagger = conj(c) (-1)^|x & z| X^x Z^z.
  std::vector<MaskedTerm> adjoint(terms.begin(), terms.end());
  for (auto& t : adjoint) {
    const double sign = (std::popcount(t.x_mask & t.z_mask) & 1) ? -1.0 : 1.0;
    t.coefficient = sign * std::conj(t.coefficient);
  }
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_sites);
  Eigen::VectorXcd tmp(dim), out(dim);
  return lanczos_sqrt_top(
      dim,
      [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
        apply_terms(terms, x, tmp);
        apply_terms(adjoint, tmp, out);
        return out;
      },
      "the operator norm");
}

std::vector<double> probe_commutator_norms_serial(
    std::span<const DenseMatrix> observables, std::size_t n_sites,
    std::span<const ProbeRequest> requests) {
  std::vector<double> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    check_request(observables, n_sites, r);
    const DenseMatrix p =
        dense_matrix(PauliString::single(n_sites, r.site, r.letter), n_sites);
    const DenseMatrix& a = observables[r.observable];
    const DenseMatrix c = a * p - p * a;
    out.push_back(spectral_norm(c));
  }
  return out;
}

namespace {

// 2 sigma_max of the off-diagonal blocks, or 2 ||block||_F when that already
// sits at or below `ceiling`.
double probe_value(const DenseMatrix& a, std::size_t n_sites, const ProbeRequest& r,
                   double ceiling) {
  DenseMatrix upper = probe_block(a, n_sites, r.site, r.letter, 0, 1);
  // For Hermitian A the (-,+) block is the adjoint of the (+,-) block.
  DenseMatrix lower;
  if (!a.isApprox(a.adjoint(), 1e-14)) lower = probe_block(a, n_sites, r.site, r.letter, 1, 0);
  const double frobenius = 2.0 * std::max(upper.norm(), lower.size() ? lower.norm() : 0.0);
  if (frobenius <= ceiling) return frobenius;
  double sigma = largest_singular_value(upper);
  if (lower.size()) sigma = std::max(sigma, largest_singular_value(lower));
  return 2.0 * sigma;
}

std::vector<double> probe_values(std::span<const DenseMatrix> observables,
                                 std::size_t n_sites, std::span<const ProbeRequest> requests,
                                 std::span<const double> ceilings) {
  for (const auto& r : requests) check_request(observables, n_sites, r);
  std::vector<double> out(requests.size(), 0.0);
  const auto count = static_cast<std::int64_t>(requests.size());
  // Exceptions must not escape an OpenMP region.
  std::vector<std::string> errors(requests.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < count; ++idx) {
    const auto k = static_cast<std::size_t>(idx);
    const auto& r = requests[k];
    try {
      out[k] = probe_value(observables[r.observable], n_sites, r,
                           ceilings.empty() ? -1.0 : ceilings[k]);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericError(e);
  }
  return out;
}

}  // namespace

std::vector<double> probe_commutator_norms(
    std::span<const DenseMatrix> observables, std::size_t n_sites,
    std::span<const ProbeRequest> requests) {
  return probe_values(observables, n_sites, requests, {});
}

std::vector<double> probe_commutator_certificates(
    std::span<const DenseMatrix> observables, std::size_t n_sites,
    std::span<const ProbeRequest> requests, std::span<const double> ceilings) {
  if (ceilings.size() != requests.size())
    throw ArgumentError("need one ceiling per probe request");
  return probe_values(observables, n_sites, requests, ceilings);
}

int worker_count() { return omp_get_max_threads(); }

}  // namespace lightcone::kernels
