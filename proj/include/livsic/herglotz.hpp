// Atomic matrix-valued measures on the circle and the line, the
// disk <-> half-plane Herglotz dictionary, reproducing kernels of Herglotz
// spaces, and Cauchy transforms.
//
// Normalisation ledger: circle measures are stored unnormalised as
// sigma(Om) = J* P_U(Om) J, so spectral measures of unitary extensions are
// unital exactly.  Every pi factor is applied explicitly at a named formula
// site:
//   * measure_transform:   line weight = pi (1 + t^2) * circle weight,
//   * herglotz_eval:       (sigma o b)-weights recovered as w / (pi (1+t^2)),
//   * big model kernels:   Omega* Omega equals the Herglotz-space kernel of
//                          pi * G (see extension.hpp).
#pragma once

#include "livsic/inner.hpp"

namespace livsic {

inline constexpr double kPi = 3.14159265358979323846;

enum class MeasureDomain { circle, line };

struct MeasureAtom {
  Complex point;  // unimodular (circle) or real (line)
  Matrix weight;  // n x n PSD
};

struct AtomicMatrixMeasure {
  MeasureDomain domain = MeasureDomain::circle;
  std::vector<MeasureAtom> atoms;
  Eigen::Index dim = 1;

  Matrix total() const {
    Matrix t = Matrix::Zero(dim, dim);
    for (const auto& a : atoms) t += a.weight;
    return t;
  }

  void validate(double tol = 1e-8) const {
    for (const auto& a : atoms) {
      if (a.weight.rows() != dim || a.weight.cols() != dim)
        throw Error("AtomicMatrixMeasure: weight dimension mismatch");
      PsdResult p = psd_check(a.weight, tol);
      if (!p.psd)
        throw Error("AtomicMatrixMeasure: weight at " + detail::str(a.point) +
                    " not PSD, min eigenvalue " + detail::str(p.min_eigenvalue));
      if (domain == MeasureDomain::circle &&
          std::abs(std::abs(a.point) - 1.0) > tol)
        throw Error("AtomicMatrixMeasure: circle atom not unimodular");
      if (domain == MeasureDomain::line && std::abs(a.point.imag()) > tol)
        throw Error("AtomicMatrixMeasure: line atom not real");
    }
    for (std::size_t a = 0; a < atoms.size(); ++a)
      for (std::size_t b = a + 1; b < atoms.size(); ++b)
        if (std::abs(atoms[a].point - atoms[b].point) <= tol)
          throw Error("AtomicMatrixMeasure: atoms must sit at distinct points");
  }
};

// Herglotz representation data of a contractive function: P is the mass of
// the circle measure at 1, the line measure is its b-pushforward scaled by
// pi (1 + t^2).
struct HerglotzData {
  Matrix p;                      // n x n PSD
  AtomicMatrixMeasure measure;   // on the line

  Eigen::Index dim() const { return p.rows(); }
};

// Circle -> (P, Sigma): P is the weight at alpha = 1; each atom (alpha, w)
// with alpha != 1 maps to t = b^-1(alpha) with weight pi (1 + t^2) w.
inline HerglotzData measure_transform(const AtomicMatrixMeasure& sigma,
                                      double tol = 1e-9) {
  if (sigma.domain != MeasureDomain::circle)
    throw Error("measure_transform: expected a circle measure");
  HerglotzData out;
  out.p = Matrix::Zero(sigma.dim, sigma.dim);
  out.measure.domain = MeasureDomain::line;
  out.measure.dim = sigma.dim;
  for (const auto& a : sigma.atoms) {
    if (std::abs(a.point - 1.0) <= tol) {
      out.p += a.weight;
      continue;
    }
    Complex t = mobius_b_inv(a.point);
    double tr = t.real();
    out.measure.atoms.push_back(
        {Complex(tr, 0.0), kPi * (1.0 + tr * tr) * a.weight});
  }
  std::sort(out.measure.atoms.begin(), out.measure.atoms.end(),
            [](const MeasureAtom& a, const MeasureAtom& b) {
              return a.point.real() < b.point.real();
            });
  return out;
}

// Inverse map: t -> b(t) with weight w / (pi (1 + t^2)); P goes to the atom
// at 1.
inline AtomicMatrixMeasure measure_transform_inverse(const HerglotzData& h,
                                                     double tol = 1e-12) {
  AtomicMatrixMeasure sigma;
  sigma.domain = MeasureDomain::circle;
  sigma.dim = h.dim();
  if (h.p.norm() > tol) sigma.atoms.push_back({Complex(1.0, 0.0), h.p});
  for (const auto& a : h.measure.atoms) {
    double t = a.point.real();
    sigma.atoms.push_back({mobius_b(t), a.weight / (kPi * (1.0 + t * t))});
  }
  return sigma;
}

// G(z) = -i z P + sum (t z + 1) / (i (t - z)) * weight / (pi (1 + t^2)).
inline Matrix herglotz_eval(const HerglotzData& h, Complex z) {
  if (std::abs(z.imag()) < 1e-14) throw Error("herglotz_eval: z must be non-real");
  Matrix g = -kI * z * h.p;
  for (const auto& a : h.measure.atoms) {
    double t = a.point.real();
    g += (t * z + 1.0) / (kI * (t - z)) / (kPi * (1.0 + t * t)) * a.weight;
  }
  return g;
}

inline HerglotzFn herglotz_function(const HerglotzData& h) {
  HerglotzFn g;
  g.dim = h.dim();
  g.evaluator = [h](Complex z) { return herglotz_eval(h, z); };
  return g;
}

// K_w(z) = (i/pi) (G(z) + G(w)*) / (z - conj w).
inline Matrix herglotz_kernel(const HerglotzFn& g, Complex w, Complex z) {
  if (std::abs(z.imag()) < 1e-14 || std::abs(w.imag()) < 1e-14)
    throw Error("herglotz_kernel: points must be non-real");
  if (std::abs(z - std::conj(w)) < 1e-12)
    throw Error("herglotz_kernel: z = conj(w) is a removable-limit point, rejected");
  return kI / kPi * (g.eval(z) + g.eval(w).adjoint()) / (z - std::conj(w));
}

// (W h)(z) = (1/(i pi)) sum 1/(t - z) * weight(t) * h(t).
inline Vector cauchy_transform(const AtomicMatrixMeasure& sigma,
                               const std::vector<Vector>& h_at_atoms, Complex z) {
  if (sigma.domain != MeasureDomain::line)
    throw Error("cauchy_transform: expected a line measure");
  if (h_at_atoms.size() != sigma.atoms.size())
    throw Error("cauchy_transform: one h-value per atom required");
  if (std::abs(z.imag()) < 1e-14)
    throw Error("cauchy_transform: z must be non-real");
  Vector acc = Vector::Zero(sigma.dim);
  for (std::size_t k = 0; k < sigma.atoms.size(); ++k) {
    double t = sigma.atoms[k].point.real();
    acc += 1.0 / (kI * kPi * (t - z)) * (sigma.atoms[k].weight * h_at_atoms[k]);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Kernel Grams

struct KernelGram {
  std::vector<Complex> points;
  std::vector<Vector> directions;
  Matrix gram;  // gram(j,k) = <K_{p_k} d_k, K_{p_j} d_j> = d_j* K_{p_k}(p_j) d_k
};

inline KernelGram kernel_gram(const std::function<Matrix(Complex, Complex)>& kernel,
                              const std::vector<Complex>& points,
                              const std::vector<Vector>& directions) {
  if (points.size() != directions.size())
    throw Error("kernel_gram: one direction per point required");
  const Eigen::Index m = Eigen::Index(points.size());
  KernelGram out;
  out.points = points;
  out.directions = directions;
  out.gram = Matrix(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k)
      out.gram(j, k) = directions[std::size_t(j)].dot(
          kernel(points[std::size_t(k)], points[std::size_t(j)]) *
          directions[std::size_t(k)]);
  return out;
}

}  // namespace livsic
