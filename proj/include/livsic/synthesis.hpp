// Constructive half of the extension bijection: given scalar rational inner
// theta <= phi (both vanishing at i), build a concrete model of the
// compressed Cayley multiplication on K^2_phi, the canonical unitary
// extension with parameter 1, and the isometric copy of K^2_theta inside it.
// The returned extension satisfies  livsic_char(base) ~ theta  and
// ext_char(result) ~ phi.
//
// Representation: K^2_phi (phi a Blaschke product of degree d with zeros
// z_j in C+) is the span of the Cauchy kernels 1/(z - conj z_j)^p,
// p = 1..mult_j, equivalently { r(z)/q(z) : deg r <= d-1 } with
// q = prod (z - conj z_j)^mult.  Elements are carried as numerator
// coefficient vectors; the Gram of the kernel basis is exact by residues.
#pragma once

#include "livsic/extension.hpp"

namespace livsic {

namespace detail {

// integral over R of 1 / ((x - conj a)^p (x - b)^q), a, b in C+, divided by
// pi: closes in C+, only the pole at b contributes.
inline Complex kernel_pair_inner(Complex a, int p, Complex b, int q) {
  double binom = 1.0;
  for (int k = 1; k <= q - 1; ++k) binom *= double(p + k - 1) / double(k);
  double sign = (q % 2 == 1) ? 1.0 : -1.0;
  return 2.0 * kI * sign * binom *
         std::pow(b - std::conj(a), Complex(double(1 - p - q)));
}

// coefficients (ascending, length len) of prod (z - r) over roots.
inline Vector poly_coeffs(const std::vector<Complex>& roots, Eigen::Index len) {
  Polynomial p = Polynomial::from_roots(roots);
  Vector c = Vector::Zero(len);
  c.head(p.coeffs.size()) = p.coeffs;
  return c;
}

}  // namespace detail

struct SynthesisResult {
  ExtensionData extension;  // U on C^{deg phi}, base on the first deg theta coords
  Matrix model_embedding;   // deg_phi x deg_theta isometry: K^2_theta copy in
                            // the orthonormal model coordinates of K^2_phi
};

inline SynthesisResult synthesize_extension(const ScalarInner& theta,
                                            const ScalarInner& phi,
                                            double tol = 1e-7) {
  if (!divides(theta, phi, 1e-7))
    throw Error("synthesize_extension: theta does not divide phi");
  auto has_i = [](const ScalarInner& f) {
    for (Complex z : f.zeros)
      if (std::abs(z - kI) <= 1e-8) return true;
    return false;
  };
  if (!has_i(theta) || !has_i(phi))
    throw Error("synthesize_extension: both functions must vanish at i");

  // cluster the zeros of phi into (zero, multiplicity) pairs
  auto clusters = cluster_points(phi.zeros, 1e-7);
  const Eigen::Index d = Eigen::Index(phi.zeros.size());
  const Eigen::Index d_theta = Eigen::Index(theta.zeros.size());

  // kernel basis -> numerator coefficients: columns of T are the polynomial
  // coefficients of q(z) / (z - conj z_j)^p
  std::vector<Complex> den_roots;
  for (auto [z, mult] : clusters)
    for (int p = 0; p < mult; ++p) den_roots.push_back(std::conj(z));
  Matrix t_mat(d, d);
  std::vector<std::pair<Complex, int>> basis_index;  // (zero, order p)
  {
    Eigen::Index col = 0;
    for (auto [z, mult] : clusters)
      for (int p = 1; p <= mult; ++p) {
        std::vector<Complex> reduced;
        int removed = 0;
        for (Complex r : den_roots) {
          if (removed < p && std::abs(r - std::conj(z)) < 1e-12) {
            ++removed;
            continue;
          }
          reduced.push_back(r);
        }
        t_mat.col(col) = detail::poly_coeffs(reduced, d);
        basis_index.emplace_back(z, p);
        ++col;
      }
  }

  // exact Gram of the kernel basis, then the Gram in monomial coordinates
  Matrix gk(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      auto [b, q] = basis_index[std::size_t(r)];
      auto [a, p] = basis_index[std::size_t(c)];
      gk(r, c) = detail::kernel_pair_inner(a, p, b, q);
    }
  Eigen::PartialPivLU<Matrix> t_lu(t_mat);
  Matrix t_inv = t_lu.inverse();
  Matrix gm = t_inv.adjoint() * gk * t_inv;
  gm = (gm + gm.adjoint()) / 2.0;
  Eigen::LLT<Matrix> llt(gm);
  if (llt.info() != Eigen::Success)
    throw Error("synthesize_extension: model Gram not positive definite "
                "(zeros too close to the real axis or to each other?)");
  Matrix l_adj = Matrix(llt.matrixL()).adjoint();  // y = L* c

  // multiplication by b(z) on ran(B + i) = { (z+i) r / q : deg r <= d-2 }
  auto mult_columns = [&](Complex root, const std::vector<Complex>& extra,
                          Eigen::Index count) {
    Matrix s(d, count);
    for (Eigen::Index m = 0; m < count; ++m) {
      std::vector<Complex> roots = extra;
      roots.push_back(root);
      for (Eigen::Index k = 0; k < m; ++k) roots.push_back(0.0);  // z^m factor
      s.col(m) = detail::poly_coeffs(roots, d);
    }
    return s;
  };

  SynthesisResult out;
  {
    std::vector<Complex> none;
    Matrix bs = l_adj * mult_columns(-kI, none, d - 1);   // (z+i) z^m
    Matrix bs_img = l_adj * mult_columns(kI, none, d - 1);  // (z-i) z^m
    Matrix v_phi;
    if (d > 1)
      v_phi = bs_img * (bs.adjoint() * bs).fullPivLu().solve(Matrix(bs.adjoint()));
    else
      v_phi = Matrix::Zero(1, 1);

    PartialIsometrySystem sys_phi = deficiency_data(v_phi, 1e-7);
    Matrix u_phi = canonical_extension(sys_phi, identity(1), 1e-7);

    // isometric copy of K^2_theta: numerators r(z) q_rem(z), deg r <= d_theta-1
    std::vector<Complex> rem_roots = den_roots;
    for (Complex z : theta.zeros) {
      double best = 1e-6;
      std::size_t best_k = rem_roots.size();
      for (std::size_t k = 0; k < rem_roots.size(); ++k) {
        double dist = std::abs(rem_roots[k] - std::conj(z));
        if (dist < best) {
          best = dist;
          best_k = k;
        }
      }
      if (best_k == rem_roots.size())
        throw Error("synthesize_extension: zero matching failed");
      rem_roots.erase(rem_roots.begin() + long(best_k));
    }
    Matrix e_m(d, d_theta);
    for (Eigen::Index s = 0; s < d_theta; ++s) {
      std::vector<Complex> roots = rem_roots;
      for (Eigen::Index k = 0; k < s; ++k) roots.push_back(0.0);
      e_m.col(s) = detail::poly_coeffs(roots, d);
    }
    Matrix emb_raw = l_adj * e_m;
    Eigen::HouseholderQR<Matrix> qr(emb_raw);
    Matrix f = qr.householderQ() * Matrix::Identity(d, d_theta);
    // fix column phases so that F R = emb_raw with R upper triangular having
    // positive diagonal (determinism only)
    for (Eigen::Index c = 0; c < d_theta; ++c) {
      Complex diag = (f.adjoint() * emb_raw)(c, c);
      if (std::abs(diag) > 0) f.col(c) *= diag / std::abs(diag);
    }

    // base operator: multiplication by b on (z+i) r q_rem, in F-coordinates
    Matrix v_base;
    if (d_theta > 1) {
      Matrix bs_t = f.adjoint() * (l_adj * mult_columns(-kI, rem_roots, d_theta - 1));
      Matrix bs_t_img = f.adjoint() * (l_adj * mult_columns(kI, rem_roots, d_theta - 1));
      v_base = bs_t_img * (bs_t.adjoint() * bs_t)
                             .fullPivLu()
                             .solve(Matrix(bs_t.adjoint()));
    } else {
      v_base = Matrix::Zero(1, 1);
    }

    // rotate so the embedded copy occupies the first d_theta coordinates
    Matrix w(d, d);
    w.leftCols(d_theta) = f;
    if (d > d_theta) {
      Eigen::HouseholderQR<Matrix> full_qr(f);
      Matrix qfull = full_qr.householderQ();
      w.rightCols(d - d_theta) = qfull.rightCols(d - d_theta);
    }
    if ((w.adjoint() * w - identity(d)).norm() > 1e-10)
      throw Error("synthesize_extension: completion of the embedding failed");

    Matrix u_rot = w.adjoint() * u_phi * w;
    PartialIsometrySystem base = deficiency_data(v_base, 1e-7);
    out.extension = make_extension(u_rot, base, default_frame(base), tol);
    out.model_embedding = f;
  }
  return out;
}

}  // namespace livsic
