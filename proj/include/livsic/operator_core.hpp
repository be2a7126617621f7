// Partial isometries, Cayley transforms, deficiency subspaces and canonical
// unitary extensions.  The symmetric operator B is never materialised: every
// formula is routed through its Cayley transform V and Moebius calculus,
//   dom(B) = (1-V) ker(V)^perp,      B (1-V)g = i (1+V) g,
//   ran(B-z) = ((i-z) + (i+z)V) ker(V)^perp.
#pragma once

#include <array>
#include <optional>

#include "livsic/numeric.hpp"

namespace livsic {

// ---------------------------------------------------------------------------
// Moebius maps of the Cayley family

enum class MobiusKind { b, b_inverse, b_w, b_w_dagger };

struct MobiusMap {
  MobiusKind kind = MobiusKind::b;
  Complex w{0.0, 1.0};  // parameter for b_w / b_w_dagger

  Complex pole() const {
    switch (kind) {
      case MobiusKind::b:          return Complex(0, -1);
      case MobiusKind::b_inverse:  return Complex(1, 0);
      case MobiusKind::b_w:        return std::conj(w);
      case MobiusKind::b_w_dagger: return w;
    }
    return {};
  }
};

inline Complex mobius_eval(const MobiusMap& m, Complex z) {
  if (std::abs(z - m.pole()) < 1e-14)
    throw Error("mobius_eval: z hits the pole at " + detail::str(m.pole()));
  switch (m.kind) {
    case MobiusKind::b:          return (z - kI) / (z + kI);
    case MobiusKind::b_inverse:  return kI * (1.0 + z) / (1.0 - z);
    case MobiusKind::b_w:        return (z - m.w) / (z - std::conj(m.w));
    case MobiusKind::b_w_dagger: return (z - std::conj(m.w)) / (z - m.w);
  }
  return {};
}

inline Complex mobius_b(Complex z) { return mobius_eval({MobiusKind::b, {}}, z); }
inline Complex mobius_b_inv(Complex z) {
  return mobius_eval({MobiusKind::b_inverse, {}}, z);
}

// ---------------------------------------------------------------------------
// Partial isometry systems

// Fixed 20-point sampling grid in C+ u C- used by the simplicity test.
inline const std::vector<Complex>& simplicity_grid() {
  static const std::vector<Complex> grid = [] {
    std::vector<Complex> g;
    const double xs[5] = {-1.7, -0.6, 0.3, 1.1, 2.4};
    const double ys[2] = {0.55, 1.9};
    for (double y : ys)
      for (double x : xs) {
        g.emplace_back(x, y);
        g.emplace_back(x, -y);
      }
    return g;
  }();
  return grid;
}

struct PartialIsometrySystem {
  Matrix v;              // N x N, V*V a projection
  Matrix ker_basis;      // N x n orthonormal, spans ker V   = ker(B* - i)
  Matrix coker_basis;    // N x n orthonormal, spans ran(V)^perp = ker(B* + i)
  Matrix kerperp_basis;  // N x (N-n) orthonormal, spans ker(V)^perp
  Matrix dom_basis;      // N x (N-n), columns (1 - V) * kerperp columns
  bool simple = false;

  Eigen::Index dim() const { return v.rows(); }
  Eigen::Index index() const { return ker_basis.cols(); }

  // Basis of ran(B - z) = ((i-z) + (i+z)V) ker(V)^perp.
  Matrix range_basis(Complex z) const {
    return ((kI - z) * identity(dim()) + (kI + z) * v) * kerperp_basis;
  }

  // Action of B on dom(B): f = (1-V)g  ->  i (1+V) g.
  Vector apply_b_op(const Vector& f) const {
    Matrix one_minus = (identity(dim()) - v) * kerperp_basis;
    Vector g = one_minus.colPivHouseholderQr().solve(f);
    if ((one_minus * g - f).norm() > 1e-9 * std::max(1.0, f.norm()))
      throw Error("apply_b_op: vector not in dom(B)");
    return kI * ((identity(dim()) + v) * (kerperp_basis * g));
  }
};

struct DeficiencyFrame {
  Matrix j;   // N x n isometry onto ker(B* + i) = ran(V)^perp
  Matrix ji;  // N x n isometry onto ker(B* - i) = ker V
};

inline DeficiencyFrame default_frame(const PartialIsometrySystem& sys) {
  return {sys.coker_basis, sys.ker_basis};
}

// Columns spanning ker(B* - z) = ran(B - conj(z))^perp; orthonormal, rank n.
inline Matrix defect_vector(const PartialIsometrySystem& sys, Complex z,
                            double tol = 1e-10) {
  if (std::abs(z.imag()) < 1e-14)
    throw Error("defect_vector: z must be non-real");
  Matrix range = sys.range_basis(std::conj(z));
  Matrix space = nullspace(range.adjoint(), tol);
  if (space.cols() != sys.index())
    throw Error("defect_vector: rank defect at z = " + detail::str(z) +
                " (exceptional point)");
  return space;
}

inline PartialIsometrySystem deficiency_data(const Matrix& v, double tol = kGoldenTol) {
  if (v.rows() != v.cols()) throw Error("deficiency_data: V must be square");
  if (!all_finite(v)) throw Error("deficiency_data: non-finite entries");
  Matrix vv = v.adjoint() * v;
  const double proj_resid = (vv - vv * vv).norm();
  if (proj_resid > tol * std::max(1.0, vv.norm()))
    throw Error("deficiency_data: V*V is not a projection, ||V*V - (V*V)^2|| = " +
                detail::str(proj_resid));

  PartialIsometrySystem sys;
  sys.v = v;
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > 0.5) ++r;  // singular values are 0 or 1 here
  sys.ker_basis = svd.matrixV().rightCols(v.cols() - r);
  sys.coker_basis = svd.matrixU().rightCols(v.rows() - r);
  sys.kerperp_basis = svd.matrixV().leftCols(r);
  sys.dom_basis = (identity(v.rows()) - v) * sys.kerperp_basis;
  if (sys.ker_basis.cols() != sys.coker_basis.cols())
    throw Error("deficiency_data: unequal deficiency indices");

  // Sampled simplicity surrogate: the defect spaces over a fixed grid must
  // span the whole space.
  if (sys.index() == 0) {
    sys.simple = false;
  } else {
    Matrix stack(v.rows(), Eigen::Index(simplicity_grid().size()) * sys.index());
    Eigen::Index col = 0;
    bool ok = true;
    for (Complex z : simplicity_grid()) {
      Matrix range = sys.range_basis(std::conj(z));
      Matrix space = nullspace(range.adjoint(), 1e-10);
      if (space.cols() != sys.index()) { ok = false; break; }
      stack.middleCols(col, sys.index()) = space;
      col += sys.index();
    }
    sys.simple = ok && rank(stack, 1e-8) == v.rows();
  }
  return sys;
}

// True iff U (unitary on C^M, M >= N, H embedded as the first N coordinates)
// agrees with V on ker(V)^perp and C^M is minimal: the joint Krylov span of
// {U, U*} applied to H is all of C^M.
inline bool verify_extension(const Matrix& u, const PartialIsometrySystem& sys,
                             double tol = kGoldenTol) {
  const Eigen::Index m = u.rows(), n = sys.dim();
  if (u.rows() != u.cols()) throw Error("verify_extension: U must be square");
  if (m < n) throw Error("verify_extension: U smaller than V");
  const double unit_resid = (u.adjoint() * u - identity(m)).norm();
  if (unit_resid > tol * std::max(1.0, u.norm()))
    throw Error("verify_extension: U not unitary, ||U*U - 1|| = " +
                detail::str(unit_resid));

  Matrix kerperp_emb = Matrix::Zero(m, sys.kerperp_basis.cols());
  kerperp_emb.topRows(n) = sys.kerperp_basis;
  Matrix image_emb = Matrix::Zero(m, sys.kerperp_basis.cols());
  image_emb.topRows(n) = sys.v * sys.kerperp_basis;
  if ((u * kerperp_emb - image_emb).norm() > tol * std::max<double>(1.0, double(n)))
    return false;

  // Minimality via the joint Krylov span of U and U* on H.
  Matrix block = Matrix::Zero(m, n);
  block.topLeftCorner(n, n) = identity(n);
  Matrix krylov(m, 2 * n * (m + 1));
  Matrix fwd = block, bwd = block;
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k <= m; ++k) {
    krylov.middleCols(col, n) = fwd;
    col += n;
    krylov.middleCols(col, n) = bwd;
    col += n;
    fwd = u * fwd;
    bwd = u.adjoint() * bwd;
  }
  return rank(krylov, 1e-10) == m;
}

// V + sum_{jk} Uparam_{jk} <.,u_j> v_k on the stored frames; unitary whenever
// Uparam is.
inline Matrix canonical_extension(const PartialIsometrySystem& sys,
                                  const DeficiencyFrame& frame,
                                  const Matrix& uparam, double tol = kGoldenTol) {
  const Eigen::Index n = sys.index();
  if (uparam.rows() != n || uparam.cols() != n)
    throw Error("canonical_extension: parameter must be n x n");
  const double unit_resid = (uparam.adjoint() * uparam - identity(n)).norm();
  if (unit_resid > tol)
    throw Error("canonical_extension: parameter not unitary, ||U*U - 1|| = " +
                detail::str(unit_resid));
  Matrix u = sys.v + frame.j * uparam.transpose() * frame.ji.adjoint();
  const double out_resid = (u.adjoint() * u - identity(sys.dim())).norm();
  if (out_resid > 10 * tol * std::max(1.0, u.norm()))
    throw Error("canonical_extension: output failed unitarity check, residual " +
                detail::str(out_resid));
  return u;
}

inline Matrix canonical_extension(const PartialIsometrySystem& sys,
                                  const Matrix& uparam, double tol = kGoldenTol) {
  return canonical_extension(sys, default_frame(sys), uparam, tol);
}

}  // namespace livsic
