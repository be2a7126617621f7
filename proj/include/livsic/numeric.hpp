// Numerical substrate: complex dense matrices, spectral decomposition of
// normal matrices, polynomial roots, positivity checks.  Everything here is
// desk-scale (dimensions well below 64); Eigen does the heavy lifting.
#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace livsic {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Default tolerances: golden-value comparisons vs sampled-grid checks.
inline constexpr double kGoldenTol = 1e-9;
inline constexpr double kGridTol = 1e-7;
// Relative eigenvalue clustering tolerance.
inline constexpr double kClusterTol = 1e-8;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline const Complex kI{0.0, 1.0};

namespace detail {

inline std::string str(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline std::string str(Complex z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace detail

inline bool all_finite(const Matrix& m) {
  return m.allFinite();
}

inline Matrix identity(Eigen::Index n) {
  return Matrix::Identity(n, n);
}

// Thin orthonormal basis of the column span (columns with significant
// singular value).
inline Matrix orth(const Matrix& m, double tol = 1e-12) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > tol * std::max(1.0, smax)) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the kernel (right null space).
inline Matrix nullspace(const Matrix& m, double tol = 1e-10) {
  if (m.rows() == 0) return identity(m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * std::max(1.0, smax)) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

inline Eigen::Index rank(const Matrix& m, double tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * std::max(1.0, smax)) ++r;
  return r;
}

// Distance between column spans measured through orthogonal projections.
inline double subspace_distance(const Matrix& a, const Matrix& b) {
  Matrix qa = orth(a), qb = orth(b);
  if (qa.cols() != qb.cols()) return 1.0;
  if (qa.cols() == 0) return 0.0;
  Matrix pa = qa * qa.adjoint(), pb = qb * qb.adjoint();
  return (pa - pb).norm();
}

// ---------------------------------------------------------------------------
// Spectral decomposition of normal matrices

struct SpectralDecomposition {
  std::vector<Complex> eigenvalues;  // one representative per cluster
  std::vector<Matrix> projections;   // orthogonal projections per cluster

  Matrix reconstruct() const {
    if (projections.empty()) return Matrix(0, 0);
    Matrix m = Matrix::Zero(projections[0].rows(), projections[0].cols());
    for (std::size_t k = 0; k < eigenvalues.size(); ++k)
      m += eigenvalues[k] * projections[k];
    return m;
  }
};

// Eigenvalues and orthogonal spectral projections of a normal matrix.
// Eigenvalues closer than `tol` (relative) are merged into one cluster so
// that multiple eigenvalues yield a single projection of the full rank.
inline SpectralDecomposition eig_normal(const Matrix& m, double tol = kClusterTol) {
  if (m.rows() != m.cols()) throw Error("eig_normal: matrix must be square");
  if (!all_finite(m)) throw Error("eig_normal: non-finite entries");
  const Eigen::Index n = m.rows();
  if (n == 0) return {};
  const double scale = std::max(1.0, m.norm());
  const double comm = (m.adjoint() * m - m * m.adjoint()).norm();
  if (comm > tol * scale * scale)
    throw Error("eig_normal: input is not normal, commutator norm = " +
                detail::str(comm));

  Eigen::ComplexSchur<Matrix> schur(m, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw Error("eig_normal: Schur iteration did not converge within " +
                std::to_string(schur.getMaxIterations()) + " sweeps");
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();

  // For a normal matrix the Schur form is diagonal up to roundoff; the Schur
  // basis is then an orthonormal eigenbasis.
  std::vector<Complex> diag(n);
  for (Eigen::Index k = 0; k < n; ++k) diag[k] = t(k, k);
  double lscale = 1.0;
  for (auto& d : diag) lscale = std::max(lscale, std::abs(d));
  const double ctol = tol * lscale;

  // Union-find clustering of the diagonal.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (std::abs(diag[a] - diag[b]) <= ctol) parent[find(int(b))] = find(int(a));

  SpectralDecomposition out;
  std::vector<int> roots;
  for (Eigen::Index k = 0; k < n; ++k)
    if (find(int(k)) == int(k)) roots.push_back(int(k));
  // Deterministic ordering: by (re, im) of the representative.
  std::sort(roots.begin(), roots.end(), [&](int a, int b) {
    if (diag[a].real() != diag[b].real()) return diag[a].real() < diag[b].real();
    return diag[a].imag() < diag[b].imag();
  });
  for (int r : roots) {
    Complex mean = 0.0;
    int count = 0;
    Matrix p = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (find(int(k)) != r) continue;
      mean += diag[k];
      ++count;
      p += q.col(k) * q.col(k).adjoint();
    }
    out.eigenvalues.push_back(mean / double(count));
    out.projections.push_back(p);
  }

  const double resid = (out.reconstruct() - m).norm();
  if (resid > 10.0 * std::max(tol * lscale, 1e-13 * scale))
    throw Error("eig_normal: reconstruction residual " + detail::str(resid) +
                " exceeds tolerance (input too far from normal?)");
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials (coefficients ascending in degree)

struct Polynomial {
  Vector coeffs;

  Polynomial() : coeffs(Vector::Zero(1)) {}
  explicit Polynomial(Vector c) : coeffs(std::move(c)) {
    if (coeffs.size() == 0) coeffs = Vector::Zero(1);
  }
  explicit Polynomial(std::vector<Complex> c)
      : coeffs(Eigen::Map<Vector>(c.data(), Eigen::Index(c.size()))) {
    if (coeffs.size() == 0) coeffs = Vector::Zero(1);
  }

  static Polynomial from_roots(const std::vector<Complex>& roots,
                               Complex leading = Complex(1.0)) {
    Vector out = Vector::Zero(Eigen::Index(roots.size()) + 1);
    out(0) = leading;
    Eigen::Index d = 0;
    for (Complex r : roots) {
      Vector next = Vector::Zero(out.size());
      for (Eigen::Index k = 0; k <= d; ++k) {
        next(k + 1) += out(k);
        next(k) -= r * out(k);
      }
      out = next;
      ++d;
    }
    return Polynomial(out);
  }

  Eigen::Index degree() const { return coeffs.size() - 1; }
  double norm() const { return coeffs.norm(); }

  Complex eval(Complex z) const {
    Complex acc = 0.0;
    for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * z + coeffs(k);
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs.size() <= 1) return Polynomial(Vector::Zero(1));
    Vector d(coeffs.size() - 1);
    for (Eigen::Index k = 1; k < coeffs.size(); ++k) d(k - 1) = double(k) * coeffs(k);
    return Polynomial(d);
  }

  // Drop trailing (highest-degree) coefficients below tol * ||p||.
  Polynomial trimmed(double tol = 1e-12) const {
    double s = std::max(norm(), 1e-300);
    Eigen::Index last = coeffs.size() - 1;
    while (last > 0 && std::abs(coeffs(last)) <= tol * s) --last;
    return Polynomial(Vector(coeffs.head(last + 1)));
  }

  Polynomial operator*(const Polynomial& o) const {
    Vector c = Vector::Zero(coeffs.size() + o.coeffs.size() - 1);
    for (Eigen::Index a = 0; a < coeffs.size(); ++a)
      for (Eigen::Index b = 0; b < o.coeffs.size(); ++b)
        c(a + b) += coeffs(a) * o.coeffs(b);
    return Polynomial(c);
  }

  Polynomial operator+(const Polynomial& o) const {
    Vector c = Vector::Zero(std::max(coeffs.size(), o.coeffs.size()));
    c.head(coeffs.size()) += coeffs;
    c.head(o.coeffs.size()) += o.coeffs;
    return Polynomial(c);
  }

  Polynomial operator-(const Polynomial& o) const {
    Vector c = Vector::Zero(std::max(coeffs.size(), o.coeffs.size()));
    c.head(coeffs.size()) += coeffs;
    c.head(o.coeffs.size()) -= o.coeffs;
    return Polynomial(c);
  }

  Polynomial scaled(Complex s) const { return Polynomial(Vector(s * coeffs)); }
};

namespace detail {

// Two guarded Newton steps; multiple roots keep their raw estimate.
inline Complex newton_polish(const Polynomial& p, const Polynomial& dp, Complex r,
                             int steps = 2) {
  const double guard = 1e-8 * std::max(1.0, p.norm());
  for (int s = 0; s < steps; ++s) {
    Complex d = dp.eval(r);
    if (std::abs(d) < guard) break;
    r -= p.eval(r) / d;
  }
  return r;
}

}  // namespace detail

// Clusters a point multiset: points linked within `tol` are merged and
// replaced by their mean.  Returns (representative, multiplicity) pairs.
inline std::vector<std::pair<Complex, int>> cluster_points(
    std::vector<Complex> pts, double tol) {
  std::vector<std::pair<Complex, int>> out;
  std::vector<bool> used(pts.size(), false);
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (std::size_t a = 0; a < pts.size(); ++a) {
    if (used[a]) continue;
    std::vector<std::size_t> group{a};
    used[a] = true;
    // breadth-first linking
    for (std::size_t g = 0; g < group.size(); ++g)
      for (std::size_t b = 0; b < pts.size(); ++b)
        if (!used[b] && std::abs(pts[group[g]] - pts[b]) <= tol) {
          used[b] = true;
          group.push_back(b);
        }
    Complex mean = 0.0;
    for (auto idx : group) mean += pts[idx];
    out.emplace_back(mean / double(group.size()), int(group.size()));
  }
  return out;
}

// Roots with multiplicity via the companion matrix, Newton polish, and
// cluster merging.  A cluster of m nearby roots is treated as one root of
// multiplicity m and its location re-polished on the (m-1)-th derivative,
// which restores full accuracy for genuinely multiple roots.
inline std::vector<Complex> poly_roots(const Polynomial& p_in, double tol = 1e-6) {
  Polynomial p = p_in.trimmed();
  if (p.norm() == 0.0) throw Error("poly_roots: zero polynomial");
  if (p.degree() < 1) throw Error("poly_roots: constant polynomial has no roots");
  const Eigen::Index d = p.degree();

  Matrix companion = Matrix::Zero(d, d);
  for (Eigen::Index k = 1; k < d; ++k) companion(k, k - 1) = 1.0;
  for (Eigen::Index k = 0; k < d; ++k)
    companion(k, d - 1) = -p.coeffs(k) / p.coeffs(d);

  Eigen::ComplexSchur<Matrix> schur(companion, /*computeU=*/false);
  if (schur.info() != Eigen::Success)
    throw Error("poly_roots: companion Schur iteration did not converge within " +
                std::to_string(schur.getMaxIterations()) + " sweeps");

  Polynomial dp = p.derivative();
  std::vector<Complex> raw(d);
  for (Eigen::Index k = 0; k < d; ++k)
    raw[k] = detail::newton_polish(p, dp, schur.matrixT()(k, k));

  auto clusters = cluster_points(raw, tol);
  std::vector<Complex> roots;
  for (auto [rep, mult] : clusters) {
    Complex r = rep;
    if (mult > 1) {
      // polish cluster mean as a simple root of p^(mult-1)
      Polynomial q = p;
      for (int k = 0; k + 1 < mult; ++k) q = q.derivative();
      r = detail::newton_polish(q, q.derivative(), r, 3);
    }
    for (int k = 0; k < mult; ++k) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

// ---------------------------------------------------------------------------
// Positivity

struct PsdResult {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

inline PsdResult psd_check(const Matrix& m, double tol = kGoldenTol) {
  if (m.rows() != m.cols()) throw Error("psd_check: matrix must be square");
  const double herm = (m - m.adjoint()).norm();
  if (herm > tol * std::max(1.0, m.norm()))
    throw Error("psd_check: input not Hermitian, ||M - M*|| = " + detail::str(herm));
  Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0,
                                           Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().size() ? es.eigenvalues()(0) : 0.0;
  return {lmin >= -tol, lmin};
}

}  // namespace livsic
