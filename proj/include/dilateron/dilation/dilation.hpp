#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dilateron/core/lp.hpp"
#include "dilateron/random.hpp"

namespace dilateron::dilation {

using cplx = std::complex<double>;

/// Axis-parallel rectangle [x0, x0 + width] x [y0, y1] inside the column X_column
/// of block Z_block.  Block 0 is the base copy holding X_i = [i, i+1] x [i, i+1];
/// blocks m >= 1 are translated copies with identical coordinates.  The width is
/// carried separately because repeated images shrink it multiplicatively far
/// below the spacing of doubles near x0.
struct RectangleCell {
  int block = 0;
  int column = 0;
  double x0 = 0.0, width = 0.0, y0 = 0.0, y1 = 0.0;

  double x1() const { return x0 + width; }
  double height() const { return y1 - y0; }
  double area() const { return width * (y1 - y0); }
};

/// Piecewise-constant function: one value per measure-disjoint cell.
struct PartitionFunction {
  std::vector<RectangleCell> cells;
  std::vector<cplx> values;

  void add(const RectangleCell& c, cplx v);
  std::size_t size() const { return cells.size(); }
  double norm(double p) const;
  /// Largest block index carrying a cell (-1 if empty).
  int max_block() const;
};

/// Merge threshold for interval endpoints and the zero-measure cutoff.
inline constexpr double kEndpointTol = 1e-14;

class DilationGeometry {
 public:
  int n() const { return n_; }
  double p() const { return p_; }
  int depth() const { return depth_; }

  /// The operator the geometry dilates, in unit-weight coordinates.
  const Eigen::MatrixXcd& matrix() const { return t_; }
  const Eigen::VectorXd& u() const { return u_; }
  const Eigen::VectorXd& v() const { return v_; }
  bool in_J(int j) const { return v_[j] > 0.0; }
  const Eigen::MatrixXd& xi() const { return xi_; }
  const Eigen::MatrixXd& eta() const { return eta_; }
  const Eigen::MatrixXd& rho() const { return rho_; }
  const Eigen::MatrixXcd& sigma() const { return sigma_; }
  /// Defect max_i (M u - u^{p-1})_i of the extremal vector.
  double extremal_defect() const { return defect_; }
  /// Factor by which row heights of eta were shrunk to fit J_i (1 when none).
  double height_rescale() const { return height_rescale_; }
  bool positive() const { return positive_; }
  /// Weights of the input space; the unit-weight reduction multiplies by w^{1/p}.
  const Eigen::VectorXd& weights() const { return weights_; }

  /// I_ij = [x_lo(i,j), x_lo(i,j) + xi_ij] inside I_j.
  double x_lo(int i, int j) const { return x_lo_(i, j); }
  /// J_ij = [y_lo(i,j), y_lo(i,j) + height(i,j)] inside J_i.
  double y_lo(int i, int j) const { return y_lo_(i, j); }
  double height(int i, int j) const { return height_(i, j); }
  /// Top of R inside J_i; above it mass is translated to the next block.
  double r_top(int i) const { return r_top_(i); }

  /// Images of one cell under S (value multipliers included); throws on Z_K overflow.
  void image(const RectangleCell& cell, std::vector<std::pair<RectangleCell, cplx>>& out) const;

  /// Max deviation of sum_i xi_ij from 1 over j in J.
  double xi_column_defect() const;
  /// max_i sum_j eta_ij - 1 (<= 0 up to rounding).
  double eta_row_excess() const;
  /// max |rho_ij xi_ij - eta_ij| over xi_ij > 0.
  double rho_identity_defect() const;

 private:
  friend struct GeometryBuilder;
  int n_ = 0;
  double p_ = 1.0;
  int depth_ = 1;
  bool positive_ = true;
  Eigen::MatrixXcd t_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd u_, v_;
  Eigen::MatrixXd xi_, eta_, rho_, rho_root_;
  Eigen::MatrixXcd sigma_;
  Eigen::MatrixXd x_lo_, y_lo_, height_;
  Eigen::VectorXd r_top_;
  double defect_ = 0.0;
  double height_rescale_ = 1.0;
};

struct GeometryBuilder;

/// Geometry for a positive contraction; K = number of forward copies Z_1..Z_K.
DilationGeometry build_dilation(const lp::PositiveOperator& t, int depth, double tol = 1e-9);
/// Sub-positive case: signs sigma_ij taken from the entries, geometry from |T|.
DilationGeometry build_dilation(const lp::SignedOperator& t, int depth, double tol = 1e-9);

PartitionFunction apply_D(const DilationGeometry& g, const Eigen::VectorXcd& alpha);
PartitionFunction apply_S(const DilationGeometry& g, const PartitionFunction& f);
PartitionFunction apply_P(const DilationGeometry& g, const PartitionFunction& f);
/// Column averages of f over X_0..X_{n-1} (the vector behind apply_P).
Eigen::VectorXcd column_averages(const DilationGeometry& g, const PartitionFunction& f);

/// True when, inside every X_i of block 0, f is a function of x alone.
bool x_dependence_check(const DilationGeometry& g, const PartitionFunction& f, double tol = 1e-12);

/// Every X_i of blocks 0..K-1 cut into a random grid of up to 3 x 3 rectangles
/// with random values (uniform [0,1] if nonnegative, complex Gaussian otherwise).
PartitionFunction random_partition_function(const DilationGeometry& g, Rng& rng, bool nonnegative);

enum class Engine {
  kAuto,
  /// Literal iteration of apply_S on the cells of D alpha, one trial at a time.
  kCells,
  /// Depth-first traversal of the orbit of each X_i under S, then linear assembly.
  kOrbit,
};

struct VerifyOptions {
  int trials = 20;
  std::uint64_t seed = 0;
  Engine engine = Engine::kAuto;
};

struct VerifyReport {
  double max_error = 0.0;
  std::vector<double> per_k_errors;  // index k = 0..K
  std::vector<std::size_t> block0_cells;  // cells of S^k D e over all columns
  Engine engine = Engine::kOrbit;
};

/// max over random alpha and k <= K of |P S^k D alpha - D T^k alpha|_p.
/// alpha is nonnegative for positive geometries and complex otherwise.
VerifyReport verify_dilation(const DilationGeometry& g, const VerifyOptions& opts = {});
VerifyReport verify_dilation(const lp::PositiveOperator& t, int depth, const VerifyOptions& opts = {});
/// Signed construction; requires |T| to be a contraction.
VerifyReport verify_subpositive(const lp::SignedOperator& t, int depth, const VerifyOptions& opts = {});

}  // namespace dilateron::dilation
