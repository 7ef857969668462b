#pragma once

#include "sublap/structure.hpp"
#include "sublap/volumes.hpp"

#include <string>
#include <vector>

namespace sublap {

/// Complement generator X_0 = Z - J^{-1} grad(theta), theta = log|omega(X_1..X_k, Z)|,
/// for a contact structure with normalized eta and Reeb field Z.
Vec contact_complement(const VolumeForm& omega, const Vec& q, const Structure& s,
                       const OneForm& eta);

enum class Solvability { Unique, Affine, None };
const char* to_string(Solvability status);

struct SolvabilityReport {
  Solvability status = Solvability::None;
  /// Normalized generator X_0 (eta(X_0) = 1) in coordinates; a particular
  /// solution in the affine case, least-squares candidate otherwise.
  Vec complement;
  /// Coordinates of a basis of ker J (horizontal directions), affine case.
  std::vector<Vec> kernel;
  /// |J xi - b| of the least-squares solution.
  double residual = 0.0;
  int dimension = 0;
  /// For None: the residual clears the infeasibility threshold.
  bool certified = false;
};

struct SolveTolerances {
  double rank = 1e-8;         ///< singular values of J below this count as zero
  double consistent = 1e-8;   ///< residual below this is a solution
  double infeasible = 1e-4;   ///< residual above this certifies "none"
};

/// Classifies the compatible complements for omega at q by solving
/// J xi = d eta(Z, X_.) - grad(theta). `eta` must be normalized.
SolvabilityReport corank1_solve(const VolumeForm& omega, const Vec& q, const Structure& s,
                                const OneForm& eta, const SolveTolerances& tol = {});

/// The solved complement as a vector field (re-solves at every point).
VectorField solved_complement_field(const VolumeForm& omega, const Structure& s,
                                    const OneForm& eta, const SolveTolerances& tol = {});

/// Structure constants of a Carnot algebra in an adapted basis X_1..X_n,
/// with X_1..X_k spanning the first stratum.
class CarnotSpec {
 public:
  CarnotSpec(int n, int k);

  /// [X_i, X_j] = A_ij X_n, the corank-1 algebra of type (k, k+1).
  static CarnotSpec corank1(const Eigen::MatrixXd& a);

  int dim() const { return n_; }
  int rank() const { return k_; }
  double operator()(int i, int j, int l) const { return c_[index(i, j, l)]; }
  /// Sets c_ij^l and c_ji^l = -value.
  void set_bracket(int i, int j, int l, double value);

  /// Throws InvalidSpec on antisymmetry or Jacobi violations.
  void validate(double tol = 1e-10) const;
  double jacobi_defect() const;

 private:
  size_t index(int i, int j, int l) const { return static_cast<size_t>((i * n_ + j) * n_ + l); }
  int n_;
  int k_;
  std::vector<double> c_;
};

/// Solutions of tr(l o ad_{X_i}) = 0, i = 1..k, over linear maps l: V_0 -> D.
/// A map is stored as a vector with entry a * (n - k) + (b - k) = D-component a of l(X_b).
struct ComplementSpace {
  int dimension = 0;
  Eigen::MatrixXd basis;        ///< columns span the solution space
  Eigen::MatrixXd functionals;  ///< k x (n-k)k, rows are l -> tr(l o ad_{X_i})

  bool contains(const Eigen::VectorXd& ell, double tol = 1e-10) const;
};

ComplementSpace carnot_complements(const CarnotSpec& spec);

struct IntegrabilityReport {
  bool integrable = false;
  double max_violation = 0.0;
  std::vector<double> g;           ///< g at each sample point
  std::vector<double> violation;   ///< max |C(e_a, e_b)| over the frame X_1..X_k, Z
  /// d = 1 only: max |(i_Z d alpha + d(d alpha(X_1, X_2)/d eta(X_1, X_2)))(X_i)|
  std::vector<double> reeb_contraction;
};

/// Decides whether some volume makes span{X_0} compatible, via
///   alpha = i_{X_0} d eta / eta(X_0),
///   g = -(d alpha ^ eta ^ (d eta)^{d-1}) / (eta ^ (d eta)^d),
///   d alpha + dg ^ eta + g d eta = 0.
/// `eta` must be normalized; the structure must be contact.
IntegrabilityReport contact_integrability(const Structure& s, const OneForm& eta,
                                          const VectorField& complement,
                                          const std::vector<Vec>& points, double tol = 1e-6);

/// alpha + g eta at q, the candidate for d(theta).
Form theta_differential(const Structure& s, const OneForm& eta, const VectorField& complement,
                        const Vec& q);

struct ThetaReconstruction {
  double along_first = 0.0;   ///< theta(q1) - theta(q0), coordinates in order 1..n
  double along_second = 0.0;  ///< same, coordinates in order n..1
  double discrepancy = 0.0;
};

/// Line integral of alpha + g eta over two staircase paths from q0 to q1.
ThetaReconstruction reconstruct_theta(const Structure& s, const OneForm& eta,
                                      const VectorField& complement, const Vec& q0, const Vec& q1,
                                      int panels = 4);

}  // namespace sublap
