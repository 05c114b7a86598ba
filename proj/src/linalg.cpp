#include "azb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "azb/errors.hpp"

namespace azb {

namespace {

constexpr int kMaxSweeps = 80;

// Fixed, mutually irrational weights for combining a commuting family into a
// single Hermitian matrix before the refinement pass.
constexpr std::array<double, 8> kCombineWeights = {
    1.0, 0.6180339887498949, 0.3819660112501051, 0.2360679774997897,
    0.1458980337503155, 0.0901699437494742, 0.0557280900008412, 0.0344418537486330};

ComplexMatrix scale_columns(const ComplexMatrix& u, const ComplexVector& d) {
  ComplexMatrix out = u;
  for (Eigen::Index c = 0; c < u.cols(); ++c) out.col(c) *= d(c);
  return out;
}

Clusters cluster_sorted(const std::vector<double>& values, double tol) {
  Clusters out;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    if (out.empty() || std::abs(values[i] - values[out.back().front()]) > tol) {
      out.push_back({i});
    } else {
      out.back().push_back(i);
    }
  }
  return out;
}

// In-place cyclic Jacobi on a Hermitian matrix; v accumulates the rotations.
void jacobi_sweeps(ComplexMatrix& a, ComplexMatrix& v) {
  const Eigen::Index n = a.rows();
  const double scale = a.norm();
  if (scale == 0.0) return;
  const double target = 1e-15 * scale;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 0; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= target) return;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-300) continue;
        const Complex w = apq / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex wc = std::conj(w);
        // columns: A <- A G with G = [[c, s], [-s conj(w), c conj(w)]]
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * wc * akq;
          a(k, q) = s * akp + c * wc * akq;
        }
        // rows: A <- G^* A
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s * w * aqk;
          a(q, k) = s * apk + c * w * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s * wc * vkq;
          v(k, q) = s * vkp + c * wc * vkq;
        }
      }
    }
  }
}

struct RawEig {
  std::vector<double> values;  // ascending
  ComplexMatrix basis;
};

RawEig jacobi_eig(const ComplexMatrix& h) {
  ComplexMatrix a = (h + h.adjoint()) * 0.5;
  ComplexMatrix v = ComplexMatrix::Identity(h.rows(), h.cols());
  jacobi_sweeps(a, v);
  const int n = static_cast<int>(h.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x).real() < a(y, y).real(); });
  RawEig out;
  out.values.resize(n);
  out.basis.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]).real();
    out.basis.col(i) = v.col(order[i]);
  }
  return out;
}

double spectral_scale(const std::vector<double>& values) {
  double s = 0.0;
  for (double x : values) s = std::max(s, std::abs(x));
  return s;
}

// Diagonalize member `level` of the family inside the columns of `basis`
// listed in `cluster`, split by its eigenvalues, and recurse on the next
// member. Leaves are appended to `leaves`.
void refine(ComplexMatrix& basis, const std::vector<ComplexMatrix>& hermitian,
            const std::vector<double>& scales, const std::vector<int>& cluster,
            std::size_t level, double tol, Clusters& leaves) {
  if (cluster.size() == 1 || level >= hermitian.size()) {
    leaves.push_back(cluster);
    return;
  }
  const int k = static_cast<int>(cluster.size());
  ComplexMatrix sub(basis.rows(), k);
  for (int i = 0; i < k; ++i) sub.col(i) = basis.col(cluster[i]);
  const ComplexMatrix restricted = sub.adjoint() * hermitian[level] * sub;
  const RawEig local = jacobi_eig(restricted);
  const ComplexMatrix rotated = sub * local.basis;
  for (int i = 0; i < k; ++i) basis.col(cluster[i]) = rotated.col(i);
  const Clusters parts = cluster_sorted(local.values, tol * scales[level]);
  for (const auto& part : parts) {
    std::vector<int> mapped;
    mapped.reserve(part.size());
    for (int i : part) mapped.push_back(cluster[i]);
    refine(basis, hermitian, scales, mapped, level + 1, tol, leaves);
  }
}

// Joint diagonalization of commuting Hermitian matrices.
ComplexMatrix joint_hermitian_basis(const std::vector<ComplexMatrix>& hermitian,
                                    double cluster_tol, Clusters& leaves) {
  const Eigen::Index n = hermitian.front().rows();
  ComplexMatrix combined = ComplexMatrix::Zero(n, n);
  std::vector<double> scales(hermitian.size(), 0.0);
  for (std::size_t i = 0; i < hermitian.size(); ++i) {
    const double norm = hermitian[i].norm();
    scales[i] = std::max(norm, 1e-300);
    if (norm > 0.0) combined += kCombineWeights[i % kCombineWeights.size()] / norm * hermitian[i];
  }
  RawEig eig = jacobi_eig(combined);
  const Clusters coarse =
      cluster_sorted(eig.values, cluster_tol * std::max(spectral_scale(eig.values), 1e-300));
  leaves.clear();
  for (const auto& cluster : coarse)
    refine(eig.basis, hermitian, scales, cluster, 0, cluster_tol, leaves);
  return eig.basis;
}

// Order key for normal spectra: sector (or argument) first, then modulus.
struct SpectralKey {
  int sector;
  double angle;
  double modulus;
};

SpectralKey spectral_key(Complex z, int sectors, double zero_tol) {
  const double r = std::abs(z);
  if (r <= zero_tol) return {-1, -1.0, 0.0};
  double angle = std::arg(z);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  if (sectors > 0) {
    const double width = 2.0 * std::numbers::pi / sectors;
    int sector = static_cast<int>(std::lround(angle / width)) % sectors;
    return {sector, 0.0, r};
  }
  return {0, angle, r};
}

}  // namespace

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return scale_columns(basis, eigenvalues) * basis.adjoint();
}

double frobenius(const ComplexMatrix& x) { return x.norm(); }

double hermiticity_residual(const ComplexMatrix& t) {
  const double n = t.norm();
  return n == 0.0 ? 0.0 : (t - t.adjoint()).norm() / n;
}

double normality_residual(const ComplexMatrix& t) {
  const double n = t.squaredNorm();
  return n == 0.0 ? 0.0 : (t * t.adjoint() - t.adjoint() * t).norm() / n;
}

double unitarity_residual(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm();
}

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
  return x * y - y * x;
}

double commutator_norm(const ComplexMatrix& x, const ComplexMatrix& y) {
  return commutator(x, y).norm();
}

double off_diagonal_mass(const ComplexMatrix& x) {
  const double total = x.norm();
  if (total == 0.0) return 0.0;
  const double diag = x.diagonal().norm();
  return std::sqrt(std::max(0.0, total * total - diag * diag)) / total;
}

SpectralDecomposition hermitian_eig(const ComplexMatrix& t, const TolerancePolicy& policy) {
  if (t.rows() != t.cols()) throw ParameterError("hermitian_eig: matrix is not square");
  const double h = hermiticity_residual(t);
  if (h > policy.hermitian) throw DomainError("hermitian_eig: input is not Hermitian", h, policy.hermitian);
  RawEig eig = jacobi_eig(t);
  SpectralDecomposition out;
  out.eigenvalues = ComplexVector(eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i) out.eigenvalues(i) = eig.values[i];
  out.basis = std::move(eig.basis);
  out.clusters = cluster_sorted(eig.values, policy.cluster * std::max(t.norm(), 1e-300));
  return out;
}

JointDecomposition joint_diag(const std::vector<ComplexMatrix>& family,
                              const TolerancePolicy& policy) {
  if (family.empty()) throw ParameterError("joint_diag: empty family");
  const Eigen::Index n = family.front().rows();
  for (const auto& x : family)
    if (x.rows() != n || x.cols() != n) throw ParameterError("joint_diag: dimension mismatch");

  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double scale = family[i].norm() * family[j].norm();
      if (scale == 0.0) continue;
      const double c = commutator_norm(family[i], family[j]) / scale;
      if (c > policy.commutation)
        throw DomainError("joint_diag: family does not commute", c, policy.commutation);
    }
  }

  std::vector<ComplexMatrix> hermitian;
  for (const auto& x : family) {
    const double normal = normality_residual(x);
    if (normal > policy.normality)
      throw DomainError("joint_diag: member is not normal", normal, policy.normality);
    hermitian.push_back((x + x.adjoint()) * 0.5);
    if (hermiticity_residual(x) > policy.hermitian)
      hermitian.push_back((x - x.adjoint()) * Complex(0.0, -0.5));
  }

  JointDecomposition out;
  out.basis = joint_hermitian_basis(hermitian, policy.cluster, out.clusters);
  for (const auto& x : family) {
    const ComplexMatrix d = out.basis.adjoint() * x * out.basis;
    out.diagonals.push_back(d.diagonal());
    out.off_diagonal = std::max(out.off_diagonal, off_diagonal_mass(d));
  }
  (void)n;
  return out;
}

SpectralDecomposition normal_eig(const ComplexMatrix& t, const TolerancePolicy& policy,
                                 int sectors) {
  if (t.rows() != t.cols()) throw ParameterError("normal_eig: matrix is not square");
  const double normal = normality_residual(t);
  if (normal > policy.normality)
    throw DomainError("normal_eig: matrix is not normal", normal, policy.normality);

  const std::vector<ComplexMatrix> parts = {(t + t.adjoint()) * 0.5,
                                            (t - t.adjoint()) * Complex(0.0, -0.5)};
  Clusters leaves;
  const ComplexMatrix basis = joint_hermitian_basis(parts, policy.cluster, leaves);
  const int n = static_cast<int>(t.rows());
  ComplexVector values(n);
  for (int i = 0; i < n; ++i) values(i) = basis.col(i).dot(t * basis.col(i));

  const double zero_tol = policy.cluster * std::max(t.norm(), 1e-300);
  std::vector<SpectralKey> keys(n);
  for (int i = 0; i < n; ++i) keys[i] = spectral_key(values(i), sectors, zero_tol);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    const auto& a = keys[x];
    const auto& b = keys[y];
    if (a.sector != b.sector) return a.sector < b.sector;
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.modulus < b.modulus;
  });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.basis.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = values(order[i]);
    out.basis.col(i) = basis.col(order[i]);
  }
  const double tol = policy.cluster * std::max(t.norm(), 1e-300);
  for (int i = 0; i < n; ++i) {
    if (out.clusters.empty() ||
        std::abs(out.eigenvalues(i) - out.eigenvalues(out.clusters.back().front())) > tol) {
      out.clusters.push_back({i});
    } else {
      out.clusters.back().push_back(i);
    }
  }
  return out;
}

ComplexVector snap_spectrum(const ComplexVector& eigenvalues, const SnapOptions& snap,
                            const TolerancePolicy& policy) {
  if (snap.mode == Snap::none) return eigenvalues;
  if (snap.lattice == nullptr) throw ParameterError("snap_spectrum: lattice required");
  const LatticeParams& p = *snap.lattice;
  ComplexVector out(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const Complex z = eigenvalues(i);
    if (std::abs(z) <= policy.snap) {
      out(i) = 0.0;
      continue;
    }
    const RayCoordinates rc = ray_coordinates(z, p);
    double modulus = std::abs(z);
    if (snap.mode == Snap::lattice) modulus = std::pow(p.lambda, std::round(rc.modulus_index));
    const Complex snapped = std::polar(modulus, p.hbar * rc.k);
    const double distance = std::abs(z - snapped) / std::abs(snapped);
    if (distance > policy.snap)
      throw DomainError("snap_spectrum: eigenvalue too far from the lattice", distance, policy.snap);
    out(i) = snapped;
  }
  return out;
}

ComplexMatrix funcalc(const SpectralDecomposition& spectrum, const ScalarFunction& f) {
  ComplexVector values(spectrum.dim());
  for (int i = 0; i < spectrum.dim(); ++i) values(i) = f(spectrum.eigenvalues(i));
  return scale_columns(spectrum.basis, values) * spectrum.basis.adjoint();
}

ComplexMatrix funcalc(const ComplexMatrix& t, const ScalarFunction& f,
                      const TolerancePolicy& policy, const SnapOptions& snap) {
  SpectralDecomposition spectrum =
      normal_eig(t, policy, snap.lattice != nullptr ? snap.lattice->n : 0);
  spectrum.eigenvalues = snap_spectrum(spectrum.eigenvalues, snap, policy);
  return funcalc(spectrum, f);
}

ComplexMatrix bifuncalc(const ComplexMatrix& t1, const ComplexMatrix& t2, const PairFunction& f,
                        const TolerancePolicy& policy) {
  const JointDecomposition joint = joint_diag({t1, t2}, policy);
  const Eigen::Index n = t1.rows();
  ComplexVector values(n);
  for (Eigen::Index i = 0; i < n; ++i) values(i) = f(joint.diagonals[0](i), joint.diagonals[1](i));
  return scale_columns(joint.basis, values) * joint.basis.adjoint();
}

ComplexMatrix kron_funcalc(const SpectralDecomposition& a, const SpectralDecomposition& b,
                           const PairFunction& f) {
  const int na = a.dim();
  const int nb = b.dim();
  ComplexVector values(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) values(i * nb + j) = f(a.eigenvalues(i), b.eigenvalues(j));
  const ComplexMatrix u = kron(a.basis, b.basis);
  return scale_columns(u, values) * u.adjoint();
}

double operator_norm(const ComplexMatrix& x, const TolerancePolicy& policy) {
  const SpectralDecomposition gram = hermitian_eig(x.adjoint() * x, policy);
  double top = 0.0;
  for (int i = 0; i < gram.dim(); ++i) top = std::max(top, gram.eigenvalues(i).real());
  return std::sqrt(top);
}

ComplexMatrix z_transform(const ComplexMatrix& t, const TolerancePolicy& policy) {
  const Eigen::Index n = t.cols();
  const ComplexMatrix gram = ComplexMatrix::Identity(n, n) + t.adjoint() * t;
  const SpectralDecomposition spectrum = hermitian_eig(gram, policy);
  const ComplexMatrix inv_sqrt =
      funcalc(spectrum, [](Complex z) { return Complex(1.0 / std::sqrt(z.real()), 0.0); });
  return t * inv_sqrt;
}

ComplexMatrix z_inverse(const ComplexMatrix& z, const TolerancePolicy& policy) {
  const Eigen::Index n = z.cols();
  const double norm = operator_norm(z, policy);
  if (norm >= 1.0) throw DomainError("z_inverse: ||Z|| must be below 1", norm, 1.0);
  const ComplexMatrix gram = ComplexMatrix::Identity(n, n) - z.adjoint() * z;
  const SpectralDecomposition spectrum = hermitian_eig(gram, policy);
  const ComplexMatrix inv_sqrt =
      funcalc(spectrum, [](Complex x) { return Complex(1.0 / std::sqrt(x.real()), 0.0); });
  return z * inv_sqrt;
}

ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y) {
  ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

ComplexMatrix place_legs(const ComplexMatrix& x, LegPattern pattern, const LegDims& dims) {
  const auto [d1, d2, d3] = dims;
  switch (pattern) {
    case LegPattern::l12:
      if (x.rows() != d1 * d2 || x.cols() != d1 * d2)
        throw ParameterError("place_legs: operator does not match legs 1,2");
      return kron(x, ComplexMatrix::Identity(d3, d3));
    case LegPattern::l23:
      if (x.rows() != d2 * d3 || x.cols() != d2 * d3)
        throw ParameterError("place_legs: operator does not match legs 2,3");
      return kron(ComplexMatrix::Identity(d1, d1), x);
    case LegPattern::l13: {
      if (x.rows() != d1 * d3 || x.cols() != d1 * d3)
        throw ParameterError("place_legs: operator does not match legs 1,3");
      const int n = d1 * d2 * d3;
      ComplexMatrix out = ComplexMatrix::Zero(n, n);
      for (int i1 = 0; i1 < d1; ++i1)
        for (int i3 = 0; i3 < d3; ++i3)
          for (int j1 = 0; j1 < d1; ++j1)
            for (int j3 = 0; j3 < d3; ++j3) {
              const Complex v = x(i1 * d3 + i3, j1 * d3 + j3);
              if (v == Complex(0.0)) continue;
              for (int i2 = 0; i2 < d2; ++i2)
                out((i1 * d2 + i2) * d3 + i3, (j1 * d2 + i2) * d3 + j3) = v;
            }
      return out;
    }
  }
  throw ParameterError("place_legs: unknown pattern");
}

}  // namespace azb
