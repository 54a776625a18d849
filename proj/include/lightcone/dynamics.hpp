#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lightcone/bound.hpp"
#include "lightcone/lattice.hpp"
#include "lightcone/operator_sum.hpp"

namespace lightcone {

/**
 * @brief Heisenberg evolution from one dense eigendecomposition of H.
 *
 * Observables are carried in the eigenbasis, A~ = V^dagger A V, so that
 * A(t) = e^{iHt} A e^{-iHt} = V (A~ .* e^{i(E_m - E_n)t}) V^dagger costs two
 * matrix products per time. Real Hamiltonians keep V real.
 */
class SpectralEvolver {
 public:
  explicit SpectralEvolver(const OperatorSum& hamiltonian,
                           std::size_t dense_cap = kDefaultDenseCap);

  std::size_t n_sites() const noexcept { return n_sites_; }
  Eigen::Index dim() const noexcept { return energies_.size(); }
  bool real_basis() const noexcept { return real_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }

  DenseMatrix to_eigenbasis(const DenseMatrix& a) const;

  /// A(t) in the computational basis from A~ in the eigenbasis.
  DenseMatrix evolve(const DenseMatrix& a_eigen, double t) const;

  /// V^dagger W and its inverse map V (e^{iEt} .* W~), for a block of columns W.
  /// Evolving the isometry of a projector Pi = W W^dagger gives Pi(t) = Y Y^dagger.
  DenseMatrix columns_to_eigenbasis(const DenseMatrix& w) const;
  DenseMatrix evolve_columns(const DenseMatrix& w_eigen, double t) const;

  /// ||[A(t), P]|| for a single-site Pauli P, from the off-diagonal block of
  /// A(t) in P's eigenbasis; never forms A(t) in full.
  double probe_norm(const DenseMatrix& a_eigen, double t, std::size_t site,
                    Pauli letter) const;

 private:
  DenseMatrix phased(const DenseMatrix& a_eigen, double t) const;

  std::size_t n_sites_;
  bool real_ = true;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd v_real_;
  DenseMatrix v_complex_;
};

/// e^{iHt} A e^{-iHt} with H = cs.hamiltonian().
DenseMatrix heisenberg_evolve_dense(const CouplingSet& cs, const OperatorSum& a, double t,
                                    std::size_t dense_cap = kDefaultDenseCap);
OperatorSum heisenberg_evolve(const CouplingSet& cs, const OperatorSum& a, double t,
                              std::size_t dense_cap = kDefaultDenseCap);

/// ||A_t B - B A_t||.
double commutator_norm(const DenseMatrix& a_t, const DenseMatrix& b);
double commutator_norm(const OperatorSum& a_t, const OperatorSum& b,
                       std::size_t dense_cap = kDefaultDenseCap);

/// P_S O = O - tr_S(O) (x) I_S / dim(H_S): removes the part of O acting
/// trivially on every site of S.
DenseMatrix project_onto(const std::vector<std::size_t>& sites, const DenseMatrix& o,
                         std::size_t n_sites);
OperatorSum project_onto(const std::vector<std::size_t>& sites, const OperatorSum& o);

/// The same projector as (1 / (2 * 4^m)) sum_w [T^w, [T^w, O]] over all 4^m
/// Pauli strings T^w supported on S, m = |S|.
DenseMatrix project_onto_casimir(const std::vector<std::size_t>& sites, const DenseMatrix& o,
                                 std::size_t n_sites);

struct EvolutionSetup {
  CouplingSet cs;
  int A_site = 0;
  int B_site = 1;
  std::vector<Pauli> A_basis{Pauli::X, Pauli::Y, Pauli::Z};
  std::vector<Pauli> B_basis{Pauli::X, Pauli::Y, Pauli::Z};
  std::vector<double> t_grid;
  double delta = 0.5;
  double refine_tolerance = 1e-4;

  void validate() const;
};

struct LightConeRecord {
  std::string model;
  double alpha = 0.0;
  int n_sites = 0;
  int r = 0;
  double delta = 0.0;
  double ts_empirical = 0.0;  // +inf when censored
  double resolution = 0.0;    // width of the final bisection bracket
  bool censored = false;
  double ts_bound = 0.0;
};

/// Normalized commutator C_r(t) = max over A_basis x B_basis of
/// ||[A(t), B]|| / (||A|| ||B||), A on A_site and B on A_site + r.
struct CommutatorProfile {
  std::vector<double> times;
  std::vector<int> r_values;
  std::vector<std::vector<double>> values;  // values[r index][t index]
};

class LightConeProbe {
 public:
  LightConeProbe(const CouplingSet& cs, int A_site, std::vector<Pauli> A_basis,
                 std::vector<Pauli> B_basis, std::size_t dense_cap = kDefaultDenseCap);

  const SpectralEvolver& evolver() const noexcept { return evolver_; }

  /// C_r(t) for all r at one time, forming each A(t) once.
  std::vector<double> normalized_commutators(double t, const std::vector<int>& r_values) const;
  /// Upper estimates of C_r(t) that fall at or below ceilings[i] exactly when
  /// C_r(t) does; cheap when the answer is far below the ceiling.
  std::vector<double> certified_commutators(double t, const std::vector<int>& r_values,
                                            const std::vector<double>& ceilings) const;
  /// C_r(t) for one r via the off-diagonal block kernel.
  double normalized_commutator(double t, int r) const;

  CommutatorProfile profile(const std::vector<double>& times,
                            const std::vector<int>& r_values) const;

  /// First grid crossing C_r(t) >= delta per r, refined by bisection.
  std::vector<LightConeRecord> crossings(const std::vector<double>& t_grid,
                                         const std::vector<int>& r_values, double delta,
                                         double refine_tolerance) const;

 private:
  /// Whether C_r(t) >= delta for each r. Each A = 2 Pi - I is carried as the
  /// isometry of Pi, which halves the evolution cost.
  std::vector<bool> reached(double t, const std::vector<int>& r_values, double delta) const;

  CouplingSet cs_;
  SpectralEvolver evolver_;
  int a_site_;
  std::vector<Pauli> a_basis_;
  std::vector<Pauli> b_basis_;
  std::vector<DenseMatrix> a_eigen_;
  std::vector<DenseMatrix> frame_eigen_;
};

/// ts_bound of a record: scrambling_time_bound for the model's alpha and h in
/// the general variant; 0 (the trivial bound) for r < 2.
double record_bound(const ModelSpec& spec, int r, double delta);

LightConeRecord empirical_scrambling_time(const EvolutionSetup& setup, int r,
                                          std::size_t dense_cap = kDefaultDenseCap);

struct SweepOptions {
  std::vector<Pauli> A_basis{Pauli::X, Pauli::Y, Pauli::Z};
  std::vector<Pauli> B_basis{Pauli::X, Pauli::Y, Pauli::Z};
  double refine_tolerance = 1e-4;
  std::size_t dense_cap = kDefaultDenseCap;
};

/// One record per (spec, r), A on site 0 and B on site r, in input order.
std::vector<LightConeRecord> lightcone_sweep(const std::vector<ModelSpec>& specs,
                                             const std::vector<int>& r_list, double delta,
                                             const std::vector<double>& t_grid,
                                             const SweepOptions& options = {});

/// 0, step, 2 step, ..., up to and including t_max.
std::vector<double> uniform_grid(double t_max, double step);

}  // namespace lightcone
