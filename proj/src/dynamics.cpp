#include "lightcone/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "lightcone/errors.hpp"
#include "lightcone/kernels.hpp"

namespace lightcone {

namespace {

bool is_real(const DenseMatrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

bool is_hermitian(const DenseMatrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

DenseMatrix combine(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) {
  DenseMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

void check_pauli_basis(const std::vector<Pauli>& basis, const char* name) {
  if (basis.empty()) throw ArgumentError(fmt::format("{} must not be empty", name));
  for (Pauli p : basis)
    if (p == Pauli::I) throw ArgumentError(fmt::format("{} may only contain X, Y, Z", name));
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) throw ArgumentError("time grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ArgumentError("time grid must be strictly increasing");
}

}  // namespace

SpectralEvolver::SpectralEvolver(const OperatorSum& hamiltonian, std::size_t dense_cap)
    : n_sites_(hamiltonian.n_sites()) {
  if (!hamiltonian.is_hermitian()) throw ArgumentError("Hamiltonian must be Hermitian");
  const DenseMatrix h = dense_matrix(hamiltonian, dense_cap);
  real_ = is_real(h);
  if (real_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    if (es.info() != Eigen::Success) throw NumericError("Hamiltonian eigensolver failed");
    energies_ = es.eigenvalues();
    v_real_ = es.eigenvectors();
  } else {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
    if (es.info() != Eigen::Success) throw NumericError("Hamiltonian eigensolver failed");
    energies_ = es.eigenvalues();
    v_complex_ = es.eigenvectors();
  }
}

DenseMatrix SpectralEvolver::to_eigenbasis(const DenseMatrix& a) const {
  if (a.rows() != dim() || a.cols() != dim())
    throw ArgumentError("observable dimension does not match the Hamiltonian");
  if (!real_) return v_complex_.adjoint() * a * v_complex_;
  const Eigen::MatrixXd re = v_real_.transpose() * a.real() * v_real_;
  if (is_real(a)) return re.cast<Complex>();
  const Eigen::MatrixXd im = v_real_.transpose() * a.imag() * v_real_;
  return combine(re, im);
}

DenseMatrix SpectralEvolver::phased(const DenseMatrix& a_eigen, double t) const {
  if (a_eigen.rows() != dim() || a_eigen.cols() != dim())
    throw ArgumentError("observable dimension does not match the Hamiltonian");
  const Eigen::VectorXcd u = (Complex(0, t) * energies_.cast<Complex>()).array().exp();
  return u.asDiagonal() * a_eigen * u.conjugate().asDiagonal();
}

DenseMatrix SpectralEvolver::evolve(const DenseMatrix& a_eigen, double t) const {
  const DenseMatrix m = phased(a_eigen, t);
  if (!real_) return v_complex_ * m * v_complex_.adjoint();
  const Eigen::MatrixXd re = v_real_ * m.real() * v_real_.transpose();
  const Eigen::MatrixXd im = v_real_ * m.imag() * v_real_.transpose();
  return combine(re, im);
}

DenseMatrix SpectralEvolver::columns_to_eigenbasis(const DenseMatrix& w) const {
  if (w.rows() != dim()) throw ArgumentError("column block dimension does not match the Hamiltonian");
  if (!real_) return v_complex_.adjoint() * w;
  return combine(v_real_.transpose() * w.real(), v_real_.transpose() * w.imag());
}

DenseMatrix SpectralEvolver::evolve_columns(const DenseMatrix& w_eigen, double t) const {
  if (w_eigen.rows() != dim()) throw ArgumentError("column block dimension does not match the Hamiltonian");
  const Eigen::VectorXcd u = (Complex(0, t) * energies_.cast<Complex>()).array().exp();
  const DenseMatrix m = u.asDiagonal() * w_eigen;
  if (!real_) return v_complex_ * m;
  return combine(v_real_ * m.real(), v_real_ * m.imag());
}

double SpectralEvolver::probe_norm(const DenseMatrix& a_eigen, double t, std::size_t site,
                                   Pauli letter) const {
  if (site >= n_sites_) throw ArgumentError(fmt::format("probe site {} out of range", site));
  const DenseMatrix m = phased(a_eigen, t);
  const Eigen::Matrix2cd q = kernels::probe_eigenbasis(letter);
  const Eigen::Index half = dim() / 2;
  const std::size_t pos = n_sites_ - 1 - site;

  // Rows of Q^dagger V split by the eigenvalue of the probe.
  auto rotated_rows = [&](const auto& v, std::size_t c) {
    using Mat = std::decay_t<decltype(v)>;
    Mat out = Mat::Zero(half, dim());
    for (std::size_t d = 0; d < 2; ++d) {
      const Complex w = std::conj(q(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)));
      if (w == Complex{}) continue;
      for (Eigen::Index i = 0; i < half; ++i) {
        const auto row = static_cast<Eigen::Index>(kernels::insert_bit(static_cast<std::size_t>(i), pos, d));
        if constexpr (std::is_same_v<Mat, Eigen::MatrixXd>)
          out.row(i) += w.real() * v.row(row);
        else
          out.row(i) += w * v.row(row);
      }
    }
    return out;
  };

  const bool hermitian = is_hermitian(a_eigen);
  double sigma = 0.0;
  if (real_ && letter != Pauli::Y) {
    const Eigen::MatrixXd v0 = rotated_rows(v_real_, 0);
    const Eigen::MatrixXd v1 = rotated_rows(v_real_, 1);
    const Eigen::MatrixXd mr = m.real();
    const Eigen::MatrixXd mi = m.imag();
    auto block = [&](const Eigen::MatrixXd& left, const Eigen::MatrixXd& right) {
      const Eigen::MatrixXd re = (left * mr) * right.transpose();
      const Eigen::MatrixXd im = (left * mi) * right.transpose();
      return combine(re, im);
    };
    sigma = kernels::largest_singular_value(block(v0, v1));
    if (!hermitian) sigma = std::max(sigma, kernels::largest_singular_value(block(v1, v0)));
  } else {
    const DenseMatrix v = real_ ? DenseMatrix(v_real_.cast<Complex>()) : v_complex_;
    const DenseMatrix v0 = rotated_rows(v, 0);
    const DenseMatrix v1 = rotated_rows(v, 1);
    sigma = kernels::largest_singular_value(v0 * m * v1.adjoint());
    if (!hermitian) sigma = std::max(sigma, kernels::largest_singular_value(v1 * m * v0.adjoint()));
  }
  return 2.0 * sigma;
}

DenseMatrix heisenberg_evolve_dense(const CouplingSet& cs, const OperatorSum& a, double t,
                                    std::size_t dense_cap) {
  if (a.n_sites() != static_cast<std::size_t>(cs.n_sites()))
    throw ArgumentError("observable and model sizes differ");
  const SpectralEvolver ev(cs.hamiltonian(), dense_cap);
  return ev.evolve(ev.to_eigenbasis(dense_matrix(a, dense_cap)), t);
}

OperatorSum heisenberg_evolve(const CouplingSet& cs, const OperatorSum& a, double t,
                              std::size_t dense_cap) {
  return pauli_decompose(heisenberg_evolve_dense(cs, a, t, dense_cap), a.n_sites());
}

double commutator_norm(const DenseMatrix& a_t, const DenseMatrix& b) {
  if (a_t.rows() != b.rows() || a_t.cols() != b.cols() || a_t.rows() != a_t.cols())
    throw ArgumentError("commutator operands have mismatched dimensions");
  return spectral_norm(DenseMatrix(a_t * b - b * a_t));
}

double commutator_norm(const OperatorSum& a_t, const OperatorSum& b, std::size_t dense_cap) {
  if (a_t.n_sites() != b.n_sites()) throw ArgumentError("commutator operands have different sizes");
  return spectral_norm(commutator(a_t, b), dense_cap);
}

namespace {

std::uint64_t site_mask(const std::vector<std::size_t>& sites, std::size_t n_sites) {
  if (sites.empty()) throw ArgumentError("projection site set must be nonempty");
  std::uint64_t mask = 0;
  for (std::size_t s : sites) {
    if (s >= n_sites) throw ArgumentError(fmt::format("site {} outside the chain", s));
    mask |= std::uint64_t{1} << (n_sites - 1 - s);
  }
  return mask;
}

}  // namespace

DenseMatrix project_onto(const std::vector<std::size_t>& sites, const DenseMatrix& o,
                         std::size_t n_sites) {
  const std::uint64_t mask = site_mask(sites, n_sites);
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << n_sites);
  if (o.rows() != dim || o.cols() != dim) throw ArgumentError("operator dimension does not match 2^n");
  const int m = std::popcount(mask);
  const double inv_dim_s = std::ldexp(1.0, -m);

  // tr_S O (x) I_S: entry (r, c) with equal S-bits is the sum over the
  // S-configurations s of O(r with s, c with s).
  const std::uint64_t rest = ~mask & (static_cast<std::uint64_t>(dim) - 1);
  DenseMatrix out = o;
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto ur = static_cast<std::uint64_t>(r);
      const auto uc = static_cast<std::uint64_t>(c);
      if ((ur & mask) != (uc & mask)) continue;
      Complex sum = 0.0;
      // Enumerate submasks s of mask.
      for (std::uint64_t s = mask;; s = (s - 1) & mask) {
        sum += o(static_cast<Eigen::Index>((ur & rest) | s), static_cast<Eigen::Index>((uc & rest) | s));
        if (s == 0) break;
      }
      out(r, c) -= inv_dim_s * sum;
    }
  }
  return out;
}

OperatorSum project_onto(const std::vector<std::size_t>& sites, const OperatorSum& o) {
  site_mask(sites, o.n_sites());
  OperatorSum out(o.n_sites(), o.drop_tolerance());
  for (const auto& [s, c] : o.terms()) {
    const bool touches = std::any_of(sites.begin(), sites.end(),
                                     [&](std::size_t site) { return s.letter(site) != Pauli::I; });
    if (touches) out.add(c, s);
  }
  return out;
}

DenseMatrix project_onto_casimir(const std::vector<std::size_t>& sites, const DenseMatrix& o,
                                 std::size_t n_sites) {
  site_mask(sites, n_sites);
  const std::size_t m = sites.size();
  const std::uint64_t count = std::uint64_t{1} << (2 * m);
  DenseMatrix acc = DenseMatrix::Zero(o.rows(), o.cols());
  for (std::uint64_t w = 0; w < count; ++w) {
    PauliString t(n_sites);
    for (std::size_t a = 0; a < m; ++a)
      t.set_letter(sites[a], static_cast<Pauli>((w >> (2 * a)) & 3));
    const DenseMatrix tm = dense_matrix(t, n_sites);
    const DenseMatrix inner = tm * o - o * tm;
    acc += tm * inner - inner * tm;
  }
  return acc / (2.0 * static_cast<double>(count));
}

void EvolutionSetup::validate() const {
  if (A_site < 0 || B_site >= cs.n_sites() || A_site >= B_site)
    throw ArgumentError(fmt::format("need 0 <= A_site < B_site < n (got {}, {})", A_site, B_site));
  check_pauli_basis(A_basis, "A_basis");
  check_pauli_basis(B_basis, "B_basis");
  check_grid(t_grid);
  if (!(delta > 0.0 && delta < 2.0)) throw DomainError("delta must lie in (0, 2)");
  if (!(refine_tolerance > 0.0)) throw ArgumentError("refine tolerance must be positive");
}

LightConeProbe::LightConeProbe(const CouplingSet& cs, int A_site, std::vector<Pauli> A_basis,
                               std::vector<Pauli> B_basis, std::size_t dense_cap)
    : cs_(cs),
      evolver_(cs.hamiltonian(), dense_cap),
      a_site_(A_site),
      a_basis_(std::move(A_basis)),
      b_basis_(std::move(B_basis)) {
  if (A_site < 0 || A_site >= cs.n_sites()) throw ArgumentError("A_site outside the chain");
  check_pauli_basis(a_basis_, "A_basis");
  check_pauli_basis(b_basis_, "B_basis");
  const auto n = static_cast<std::size_t>(cs.n_sites());
  for (Pauli p : a_basis_) {
    a_eigen_.push_back(evolver_.to_eigenbasis(
        dense_matrix(PauliString::single(n, static_cast<std::size_t>(A_site), p), dense_cap)));
    frame_eigen_.push_back(evolver_.columns_to_eigenbasis(
        kernels::pauli_plus_frame(n, static_cast<std::size_t>(A_site), p)));
  }
}

std::vector<bool> LightConeProbe::reached(double t, const std::vector<int>& r_values,
                                          double delta) const {
  const auto n = static_cast<std::size_t>(cs_.n_sites());
  std::vector<bool> out(r_values.size(), false);
  for (const auto& w_eigen : frame_eigen_) {
    const DenseMatrix y = evolver_.evolve_columns(w_eigen, t);
    for (std::size_t i = 0; i < r_values.size(); ++i) {
      const auto site = static_cast<std::size_t>(a_site_ + r_values[i]);
      for (Pauli b : b_basis_) {
        if (out[i]) break;
        // ||[A, B]|| = 2 ||[Pi, B]||.
        out[i] = kernels::projector_commutator_reaches(kernels::probe_gram(y, n, site, b), 0.5 * delta);
      }
    }
  }
  return out;
}

namespace {

std::vector<kernels::ProbeRequest> probe_requests(const std::vector<int>& r_values, int a_site,
                                                  int n_sites, const std::vector<Pauli>& letters) {
  std::vector<kernels::ProbeRequest> requests;
  for (int r : r_values) {
    const int site = a_site + r;
    if (r < 1 || site >= n_sites) throw ArgumentError(fmt::format("distance {} leaves the chain", r));
    for (Pauli b : letters) requests.push_back({0, static_cast<std::size_t>(site), b});
  }
  return requests;
}

}  // namespace

std::vector<double> LightConeProbe::normalized_commutators(double t,
                                                           const std::vector<int>& r_values) const {
  const auto n = static_cast<std::size_t>(cs_.n_sites());
  const auto requests = probe_requests(r_values, a_site_, cs_.n_sites(), b_basis_);
  std::vector<double> out(r_values.size(), 0.0);
  for (const auto& a_eigen : a_eigen_) {
    // Single-site Paulis have unit norm, so the raw norm is already normalized.
    const DenseMatrix a_t = evolver_.evolve(a_eigen, t);
    const auto norms = kernels::probe_commutator_norms(std::span(&a_t, 1), n, requests);
    for (std::size_t k = 0; k < norms.size(); ++k) {
      auto& slot = out[k / b_basis_.size()];
      slot = std::max(slot, norms[k]);
    }
  }
  return out;
}

std::vector<double> LightConeProbe::certified_commutators(double t, const std::vector<int>& r_values,
                                                          const std::vector<double>& ceilings) const {
  if (ceilings.size() != r_values.size()) throw ArgumentError("need one ceiling per distance");
  const auto n = static_cast<std::size_t>(cs_.n_sites());
  const auto requests = probe_requests(r_values, a_site_, cs_.n_sites(), b_basis_);
  std::vector<double> per_request;
  for (double c : ceilings) per_request.insert(per_request.end(), b_basis_.size(), c);
  std::vector<double> out(r_values.size(), 0.0);
  for (const auto& a_eigen : a_eigen_) {
    const DenseMatrix a_t = evolver_.evolve(a_eigen, t);
    const auto u = kernels::probe_commutator_certificates(std::span(&a_t, 1), n, requests, per_request);
    for (std::size_t k = 0; k < u.size(); ++k) {
      auto& slot = out[k / b_basis_.size()];
      slot = std::max(slot, u[k]);
    }
  }
  return out;
}

double LightConeProbe::normalized_commutator(double t, int r) const {
  const int site = a_site_ + r;
  if (r < 1 || site >= cs_.n_sites()) throw ArgumentError(fmt::format("distance {} leaves the chain", r));
  // The block kernel costs about 3/8 of a full evolution per probe letter.
  if (b_basis_.size() > 2) return normalized_commutators(t, {r}).front();
  double best = 0.0;
  for (const auto& a_eigen : a_eigen_)
    for (Pauli b : b_basis_)
      best = std::max(best, evolver_.probe_norm(a_eigen, t, static_cast<std::size_t>(site), b));
  return best;
}

CommutatorProfile LightConeProbe::profile(const std::vector<double>& times,
                                          const std::vector<int>& r_values) const {
  CommutatorProfile p;
  p.times = times;
  p.r_values = r_values;
  p.values.assign(r_values.size(), std::vector<double>(times.size(), 0.0));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto c = normalized_commutators(times[k], r_values);
    for (std::size_t i = 0; i < r_values.size(); ++i) p.values[i][k] = c[i];
  }
  return p;
}

std::vector<LightConeRecord> LightConeProbe::crossings(const std::vector<double>& t_grid,
                                                       const std::vector<int>& r_values,
                                                       double delta,
                                                       double refine_tolerance) const {
  check_grid(t_grid);
  if (!(delta > 0.0 && delta < 2.0)) throw DomainError("delta must lie in (0, 2)");
  if (!(refine_tolerance > 0.0)) throw ArgumentError("refine tolerance must be positive");

  for (int r : r_values)
    if (r < 1 || a_site_ + r >= cs_.n_sites())
      throw ArgumentError(fmt::format("distance {} leaves the chain", r));

  std::vector<LightConeRecord> records(r_values.size());
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    auto& rec = records[i];
    rec.model = cs_.spec.tag();
    rec.alpha = cs_.spec.alpha;
    rec.n_sites = cs_.n_sites();
    rec.r = r_values[i];
    rec.delta = delta;
    rec.ts_bound = record_bound(cs_.spec, r_values[i], delta);
    active.push_back(i);
  }

  for (std::size_t k = 0; k < t_grid.size() && !active.empty(); ++k) {
    std::vector<int> rs;
    for (std::size_t i : active) rs.push_back(r_values[i]);
    const auto hit = reached(t_grid[k], rs, delta);
    std::vector<std::size_t> still;
    for (std::size_t a = 0; a < active.size(); ++a) {
      auto& rec = records[active[a]];
      if (!hit[a]) {
        still.push_back(active[a]);
        continue;
      }
      if (k == 0) {
        rec.ts_empirical = 0.0;
        continue;
      }
      double lo = t_grid[k - 1];
      double hi = t_grid[k];
      while (hi - lo > refine_tolerance) {
        const double mid = 0.5 * (lo + hi);
        (reached(mid, {rec.r}, delta).front() ? hi : lo) = mid;
      }
      rec.ts_empirical = hi;
      rec.resolution = hi - lo;
    }
    active = std::move(still);
  }
  for (std::size_t i : active) {
    records[i].censored = true;
    records[i].ts_empirical = std::numeric_limits<double>::infinity();
    records[i].resolution = std::numeric_limits<double>::infinity();
  }
  return records;
}

double record_bound(const ModelSpec& spec, int r, double delta) {
  if (r < 2) return 0.0;
  BoundParams p;
  p.alpha = spec.alpha;
  p.h = spec.h;
  p.delta = delta;
  return scrambling_time_bound(r, p);
}

LightConeRecord empirical_scrambling_time(const EvolutionSetup& setup, int r,
                                          std::size_t dense_cap) {
  setup.validate();
  if (setup.B_site - setup.A_site != r)
    throw ArgumentError(fmt::format("B_site - A_site = {} differs from r = {}",
                                    setup.B_site - setup.A_site, r));
  const LightConeProbe probe(setup.cs, setup.A_site, setup.A_basis, setup.B_basis, dense_cap);
  return probe.crossings(setup.t_grid, {r}, setup.delta, setup.refine_tolerance).front();
}

std::vector<LightConeRecord> lightcone_sweep(const std::vector<ModelSpec>& specs,
                                             const std::vector<int>& r_list, double delta,
                                             const std::vector<double>& t_grid,
                                             const SweepOptions& options) {
  std::vector<LightConeRecord> out;
  if (r_list.empty()) return out;
  for (const auto& spec : specs) {
    for (int r : r_list)
      if (r < 1 || r >= spec.n_sites)
        throw ArgumentError(fmt::format("distance {} does not fit a chain of {} sites", r, spec.n_sites));
    const CouplingSet cs = build_model(spec);
    const LightConeProbe probe(cs, 0, options.A_basis, options.B_basis, options.dense_cap);
    auto recs = probe.crossings(t_grid, r_list, delta, options.refine_tolerance);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

std::vector<double> uniform_grid(double t_max, double step) {
  if (!(step > 0.0) || !(t_max >= 0.0)) throw ArgumentError("grid needs step > 0 and t_max >= 0");
  std::vector<double> g;
  const auto count = static_cast<std::size_t>(std::floor(t_max / step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k) g.push_back(static_cast<double>(k) * step);
  return g;
}

}  // namespace lightcone
