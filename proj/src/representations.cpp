#include "azb/representations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "azb/errors.hpp"
#include "azb/legops.hpp"

namespace azb {

namespace {

std::string describe(const GroupElement& g) {
  return "(" + std::to_string(g.k) + "," + std::to_string(g.j) + ")";
}

// Nearest group element for a point on the rays, modulus index reduced mod M.
GroupElement snap_element(Complex z, const LatticeParams& p) {
  const RayCoordinates rc = ray_coordinates(z, p);
  return {rc.k, wrap_modulus(static_cast<int>(std::lround(rc.modulus_index)), p)};
}

// b-eigenvector index for each group element (and back).
struct BIndex {
  std::vector<GroupElement> element;  // element of spec_b column
  std::vector<int> column;            // column of group index
};

BIndex b_index(const GPair& pair) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  BIndex out;
  out.element.resize(d);
  out.column.assign(d, -1);
  for (int beta = 0; beta < d; ++beta) {
    out.element[beta] = snap_element(pair.spec_b.eigenvalues(beta), p);
    int& slot = out.column[index_of(out.element[beta], p)];
    if (slot >= 0) throw ParameterError("spectrum of b must cover the lattice once");
    slot = beta;
  }
  return out;
}

SpectralDecomposition c_spectrum(const CExtraction& cx, const LatticeParams& p) {
  SpectralDecomposition s;
  s.basis = cx.basis;
  s.eigenvalues.resize(static_cast<Eigen::Index>(cx.characters.size()));
  for (std::size_t i = 0; i < cx.characters.size(); ++i)
    s.eigenvalues(static_cast<Eigen::Index>(i)) = embed(cx.characters[i], p);
  return s;
}

// chi(c, g) on K.
ComplexMatrix character_of(const CExtraction& cx, const GroupElement& g, const LatticeParams& p) {
  ComplexVector v(static_cast<Eigen::Index>(cx.characters.size()));
  for (std::size_t i = 0; i < cx.characters.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = chi(cx.characters[i], g, p);
  return cx.basis * v.asDiagonal() * cx.basis.adjoint();
}

// Block diagonal operator in the leg-2 b-basis, block beta = blocks[shift[beta]].
ComplexMatrix assemble_blocks(const std::vector<ComplexMatrix>& blocks, const std::vector<int>& shift,
                              int kdim) {
  const int d = static_cast<int>(shift.size());
  ComplexMatrix out = ComplexMatrix::Zero(kdim * d, kdim * d);
  for (int beta = 0; beta < d; ++beta) {
    const ComplexMatrix& f = blocks[shift[beta]];
    for (int i = 0; i < kdim; ++i)
      for (int i2 = 0; i2 < kdim; ++i2) out(i * d + beta, i2 * d + beta) = f(i, i2);
  }
  return out;
}

double max_commutation(const std::vector<ComplexMatrix>& family) {
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double scale = family[i].norm() * family[j].norm();
      if (scale > 0.0) worst = std::max(worst, commutator_norm(family[i], family[j]) / scale);
    }
  return worst;
}

}  // namespace

bool CDPair::passes(const TolerancePolicy& policy) const { return certificate.passes(policy); }

CDPair make_cdpair(const ComplexMatrix& c, const ComplexMatrix& d, const LatticeParams& p,
                   const TolerancePolicy& policy) {
  if (c.rows() != c.cols() || d.rows() != d.cols() || c.rows() != d.rows())
    throw ParameterError("make_cdpair: c and d must be square of equal size");
  CDPair cd;
  cd.lattice = p;
  cd.kdim = static_cast<int>(c.rows());
  cd.c = c;
  cd.d = d;
  TolerancePolicy loose = policy;
  loose.normality = policy.build_normality;
  cd.spec_c = normal_eig(c, loose, p.n);
  cd.spec_d = normal_eig(d, loose, p.n);
  cd.certificate = check_domain(c, d, p, policy);
  return cd;
}

CDPair regular_cdpair(const GPair& pair, const TolerancePolicy& policy) {
  const ComplexMatrix c = funcalc(pair.spec_b, [](Complex z) { return 1.0 / z; });
  return make_cdpair(c, weyl_ordered_ratio(pair, policy), pair.lattice, policy);
}

CDPair block_cdpair(const GPair& pair, const std::vector<GroupElement>& characters,
                    bool with_regular, const ComplexMatrix& mix, const TolerancePolicy& policy) {
  const LatticeParams& p = pair.lattice;
  const int ones = static_cast<int>(characters.size());
  const int k = ones + (with_regular ? p.dim() : 0);
  if (k == 0) throw ParameterError("block_cdpair: empty K");
  ComplexMatrix c = ComplexMatrix::Zero(k, k);
  ComplexMatrix d = ComplexMatrix::Zero(k, k);
  for (int i = 0; i < ones; ++i) c(i, i) = embed(characters[i], p);
  if (with_regular) {
    const CDPair reg = regular_cdpair(pair, policy);
    c.bottomRightCorner(p.dim(), p.dim()) = reg.c;
    d.bottomRightCorner(p.dim(), p.dim()) = reg.d;
  }
  if (mix.size() > 0) {
    if (mix.rows() != k || mix.cols() != k) throw ParameterError("block_cdpair: mix has wrong size");
    c = mix * c * mix.adjoint();
    d = mix * d * mix.adjoint();
  }
  return make_cdpair(c, d, p, policy);
}

Representation external_representation(const ComplexMatrix& v, int kdim, const LatticeParams& p) {
  if (kdim < 1 || v.rows() != kdim * p.dim() || v.cols() != v.rows())
    throw ParameterError("representation must act on K x H");
  Representation rep;
  rep.lattice = p;
  rep.kdim = kdim;
  rep.v = v;
  rep.provenance = "external";
  rep.unitarity = unitarity_residual(v);
  return rep;
}

ComplexMatrix bicharacter_factor(const SpectralDecomposition& spec_c, const GPair& pair,
                                 double ray_tol) {
  const LatticeParams& p = pair.lattice;
  return kron_funcalc(spec_c, pair.spec_a,
                      [&](Complex x, Complex y) { return chi_rays(x, y, p, ray_tol); });
}

Representation build_V(const CDPair& cd, const GPair& pair, const QExp& f,
                       const TolerancePolicy& policy) {
  const LatticeParams& p = pair.lattice;
  double min_b = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pair.spec_b.dim(); ++i)
    min_b = std::min(min_b, std::abs(pair.spec_b.eigenvalues(i)));
  if (min_b <= policy.snap) throw DomainError("build_V: b has a kernel", min_b, policy.snap);
  double min_c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cd.spec_c.dim(); ++i)
    min_c = std::min(min_c, std::abs(cd.spec_c.eigenvalues(i)));
  if (min_c <= policy.snap) throw DomainError("build_V: c has a kernel", min_c, policy.snap);
  double ray = 0.0;
  for (int i = 0; i < cd.spec_d.dim(); ++i)
    for (int j = 0; j < pair.spec_b.dim(); ++j)
      ray = std::max(ray, ray_distance(cd.spec_d.eigenvalues(i) * pair.spec_b.eigenvalues(j), p));
  if (ray > policy.build_ray)
    throw DomainError("build_V: spectrum of d x b is off the rays", ray, policy.build_ray);

  const ComplexMatrix first = kron_funcalc(
      cd.spec_d, pair.spec_b,
      [&](Complex x, Complex y) { return eval(f, x * y, policy.build_ray); });
  Representation rep;
  rep.lattice = p;
  rep.kdim = cd.kdim;
  rep.v = first * bicharacter_factor(cd.spec_c, pair, policy.ray);
  rep.provenance = "build_V";
  rep.unitarity = unitarity_residual(rep.v);
  return rep;
}

LegResidual rep_residual(const Representation& rep, const MultUnitary& wu,
                         const ResidualOptions& opts) {
  const LatticeParams& p = wu.lattice;
  const int d = p.dim();
  const int k = rep.kdim;
  if (rep.v.rows() != k * d) throw ParameterError("rep_residual: dimension mismatch");
  bool dense = false;
  switch (opts.mode) {
    case ResidualMode::dense:
      if (d > opts.dense_budget)
        throw BudgetError("rep_residual: NM = " + std::to_string(d) + " exceeds the dense budget " +
                          std::to_string(opts.dense_budget));
      dense = true;
      break;
    case ResidualMode::automatic:
      dense = d <= opts.dense_budget;
      break;
    case ResidualMode::probe:
      break;
  }

  const LegSpace space({k, d, d});
  std::vector<int> all(k);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<int> bulk = bulk_indices(p, opts.window);
  const std::vector<int> rows = space.product_indices({all, bulk, bulk});
  ComplexMatrix x;
  if (dense) {
    x = space.basis_columns(rows);
  } else {
    std::mt19937_64 rng(opts.probe_seed);
    std::normal_distribution<double> gauss;
    x = ComplexMatrix::Zero(space.total(), opts.probes);
    for (int c = 0; c < opts.probes; ++c)
      for (int r : rows) x(r, c) = Complex(gauss(rng), gauss(rng));
  }

  ComplexMatrix lhs = x;
  space.apply_pair(rep.v, LegPattern::l12, lhs);
  space.apply_pair(wu.w, LegPattern::l23, lhs);
  ComplexMatrix rhs = x;
  space.apply_pair(wu.w, LegPattern::l23, rhs);
  space.apply_pair(rep.v, LegPattern::l13, rhs);
  space.apply_pair(rep.v, LegPattern::l12, rhs);

  const ComplexMatrix l = select_rows(lhs, rows);
  const ComplexMatrix r = select_rows(rhs, rows);
  LegResidual out;
  out.sampled = !dense;
  out.columns = static_cast<int>(x.cols());
  const double scale = l.norm();
  out.residual = scale == 0.0 ? 0.0 : (l - r).norm() / scale;
  return out;
}

CExtraction extract_c(const Representation& rep, const GPair& pair, const TolerancePolicy& policy) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const int k = rep.kdim;
  const std::vector<GroupElement> group = elements(p);

  CExtraction out;
  std::vector<ComplexMatrix> slices;
  for (const GroupElement& g : group) {
    const ComplexMatrix x = rep.v.adjoint() * dual_action_leg2(g, rep.v, k, p);
    ComplexMatrix u = ComplexMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i)
      for (int i2 = 0; i2 < k; ++i2)
        for (int h = 0; h < d; ++h) u(i, i2) += x(i * d + h, i2 * d + h);
    u /= static_cast<double>(d);
    const double dev = (x - kron(u, ComplexMatrix::Identity(d, d))).norm() / x.norm();
    if (dev > out.slice_deviation || slices.empty()) {
      out.slice_deviation = std::max(out.slice_deviation, dev);
      out.worst = g;
    }
    slices.push_back(u);
  }
  if (out.slice_deviation > policy.slice_gate)
    throw DomainError("extract_c: slice deviation at gamma " + describe(out.worst),
                      out.slice_deviation, policy.slice_gate);

  for (std::size_t a = 0; a < group.size(); ++a)
    for (std::size_t b = 0; b < group.size(); ++b) {
      const WindowResult ab = mul(group[a], group[b], p);
      if (ab.wrap) continue;
      const double r = (slices[a] * slices[b] - slices[index_of(ab.value, p)]).norm();
      out.multiplicativity = std::max(out.multiplicativity, r);
    }
  if (out.multiplicativity > policy.character_gate)
    throw DomainError("extract_c: slices are not multiplicative", out.multiplicativity,
                      policy.character_gate);

  TolerancePolicy loose = policy;
  loose.commutation = std::max(policy.commutation, policy.slice_gate);
  loose.normality = std::max(policy.normality, policy.slice_gate);
  loose.cluster = std::max(policy.cluster, 10.0 * out.slice_deviation);
  const JointDecomposition jd = joint_diag(slices, loose);

  std::vector<GroupElement> matched(k);
  std::vector<double> worst(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const GroupElement& g : group) {
      double err = 0.0;
      for (std::size_t s = 0; s < group.size(); ++s)
        err = std::max(err, std::abs(jd.diagonals[s](i) - chi(g, group[s], p)));
      if (err < best) {
        best = err;
        matched[i] = g;
      }
    }
    worst[i] = best;
    out.character_residual = std::max(out.character_residual, best);
  }
  if (out.character_residual > policy.character_gate)
    throw DomainError("extract_c: character mismatch", out.character_residual,
                      policy.character_gate);

  // sector-then-modulus order
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return index_of(matched[x], p) < index_of(matched[y], p);
  });
  out.basis.resize(k, k);
  out.characters.resize(k);
  for (int i = 0; i < k; ++i) {
    out.basis.col(i) = jd.basis.col(order[i]);
    out.characters[i] = matched[order[i]];
  }
  out.c = c_spectrum(out, p).reconstruct();
  return out;
}

FFactor factor_f(const Representation& rep, const CExtraction& cx, const GPair& pair,
                 const TolerancePolicy& policy) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const int k = rep.kdim;
  FFactor out;
  out.f = rep.v * bicharacter_factor(c_spectrum(cx, p), pair, policy.ray).adjoint();
  const ComplexMatrix fb = to_leg2_basis(out.f, pair.spec_b.basis, k);
  out.off_block = off_block_mass(fb, k);
  out.blocks.assign(d, ComplexMatrix(k, k));
  for (int beta = 0; beta < d; ++beta)
    for (int i = 0; i < k; ++i)
      for (int i2 = 0; i2 < k; ++i2) out.blocks[beta](i, i2) = fb(i * d + beta, i2 * d + beta);
  if (out.off_block > policy.block_gate)
    throw DomainError("factor_f: off-block mass", out.off_block, policy.block_gate);
  return out;
}

DExtraction extract_d(const std::vector<ComplexMatrix>& blocks, const QExp& f, const GPair& pair,
                      const TolerancePolicy& policy) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  if (static_cast<int>(blocks.size()) != d) throw ParameterError("extract_d: one block per beta");
  const int k = static_cast<int>(blocks.front().rows());

  DExtraction out;
  out.block_commutation = max_commutation(blocks);
  TolerancePolicy loose = policy;
  loose.commutation = std::max(policy.commutation, policy.block_gate);
  loose.normality = std::max(policy.normality, policy.block_gate);
  loose.cluster = std::max(policy.cluster, policy.block_gate);
  const JointDecomposition jd = joint_diag(blocks, loose);
  out.basis = jd.basis;

  // candidate -1 is the zero point, F = 1 there
  std::vector<std::vector<Complex>> table(d + 1, std::vector<Complex>(d, 1.0));
  for (int u = 0; u < d; ++u)
    for (int beta = 0; beta < d; ++beta)
      table[u + 1][beta] = eval(f, embed(element_at(u, p), p) * pair.spec_b.eigenvalues(beta),
                                policy.build_ray);

  ComplexVector values(k);
  out.candidate.resize(k);
  out.score.resize(k);
  out.runner_up.resize(k);
  out.ambiguous.resize(k);
  for (int i = 0; i < k; ++i) {
    double s1 = std::numeric_limits<double>::infinity();
    double s2 = s1;
    int best = -1;
    for (int u = 0; u <= d; ++u) {
      double s = 0.0;
      for (int beta = 0; beta < d; ++beta) s += std::norm(jd.diagonals[beta](i) - table[u][beta]);
      if (s < s1) {
        s2 = s1;
        s1 = s;
        best = u - 1;
      } else if (s < s2) {
        s2 = s;
      }
    }
    out.candidate[i] = best;
    out.score[i] = s1;
    out.runner_up[i] = s2;
    out.ambiguous[i] = s2 <= (1.0 + policy.ambiguity) * s1;
    values(i) = best < 0 ? Complex(0.0) : embed(element_at(best, p), p);
  }
  out.d = out.basis * values.asDiagonal() * out.basis.adjoint();
  return out;
}

double lattice_match_rate(const DExtraction& dx, const ComplexMatrix& d_ref, const LatticeParams& p,
                          const TolerancePolicy& policy) {
  const int k = static_cast<int>(dx.candidate.size());
  if (k == 0) return 1.0;
  int hits = 0;
  for (int i = 0; i < k; ++i) {
    const ComplexVector w = dx.basis.col(i);
    const Complex z = w.dot(d_ref * w);
    const int expected = std::abs(z) <= policy.snap ? -1 : index_of(snap_element(z, p), p);
    if (expected == dx.candidate[i]) ++hits;
  }
  return static_cast<double>(hits) / k;
}

double por1_residual(const Representation& rep, const CExtraction& cx, const FFactor& ff,
                     const GPair& pair) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const int k = rep.kdim;
  const BIndex bi = b_index(pair);
  const ComplexMatrix chi_ca = bicharacter_factor(c_spectrum(cx, p), pair);
  const ComplexMatrix leg2 = kron(ComplexMatrix::Identity(k, k), pair.spec_b.basis);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  double worst = 0.0;
  for (const GroupElement& g : elements(p)) {
    std::vector<int> shift(d);
    std::vector<int> keep;
    for (int beta = 0; beta < d; ++beta) {
      const WindowResult gb = mul(g, bi.element[beta], p);
      shift[beta] = bi.column[index_of(gb.value, p)];
      if (!gb.wrap) keep.push_back(beta);
    }
    if (keep.empty()) continue;
    std::vector<int> rows;
    for (int i = 0; i < k; ++i)
      for (int beta : keep) rows.push_back(i * d + beta);
    const ComplexMatrix cg = kron(character_of(cx, g, p), id);
    const ComplexMatrix lhs = leg2.adjoint() * (cg * rep.v);
    const ComplexMatrix rhs = assemble_blocks(ff.blocks, shift, k) * (leg2.adjoint() * (cg * chi_ca));
    const double scale = select_rows(leg2.adjoint() * rep.v, rows).norm();
    worst = std::max(worst, select_rows(lhs - rhs, rows).norm() / scale);
  }
  return worst;
}

double por2_residual(const Representation& rep, const CExtraction& cx, const FFactor& ff,
                     const GPair& pair) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const int k = rep.kdim;
  std::vector<int> same(d);
  std::iota(same.begin(), same.end(), 0);
  const ComplexMatrix fb =
      from_leg2_basis(assemble_blocks(ff.blocks, same, k), pair.spec_b.basis, k);
  const ComplexMatrix chi_ca = bicharacter_factor(c_spectrum(cx, p), pair);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const double scale = rep.v.norm();
  double worst = 0.0;
  for (const GroupElement& g : elements(p)) {
    const ComplexMatrix cg = kron(character_of(cx, g, p), id);
    worst = std::max(worst, (rep.v * cg - fb * cg * chi_ca).norm() / scale);
  }
  return worst;
}

double leg_identity_residual(const Representation& rep, const CExtraction& cx, const FFactor& ff,
                             const GPair& pair, double window) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const int k = rep.kdim;
  const BIndex bi = b_index(pair);
  const LegSpace space({k, d, d});
  std::vector<int> all(k);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<int> bulk = bulk_indices(p, window);
  const std::vector<int> rows = space.product_indices({all, bulk, bulk});
  const ComplexMatrix x = space.basis_columns(rows);

  ComplexMatrix lhs = x;
  space.apply_pair(rep.v, LegPattern::l13, lhs);

  std::vector<Complex> cvals(k);
  for (int i = 0; i < k; ++i) cvals[i] = embed(cx.characters[i], p);
  std::vector<Complex> avals(d);
  for (int g = 0; g < d; ++g) avals[g] = pair.spec_a.eigenvalues(g);
  // spec_a.basis is the position basis up to phases; work in it directly
  const ComplexMatrix& ua = pair.spec_a.basis;

  ComplexMatrix y = x;
  space.apply_single(cx.basis.adjoint(), 0, y);
  space.apply_single(ua.adjoint(), 1, y);
  space.apply_single(ua.adjoint(), 2, y);
  ComplexVector diag(space.total());
  for (int i = 0; i < k; ++i)
    for (int g = 0; g < d; ++g)
      for (int h = 0; h < d; ++h)
        diag(space.index(i, g, h)) = chi_rays(cvals[i], avals[g] * avals[h], p);
  space.apply_diagonal(diag, y);
  space.apply_single(ua, 2, y);
  // f(a x b): leg 2 stays in the a-eigenbasis, leg 3 goes to the b-eigenbasis
  space.apply_single(cx.basis, 0, y);
  space.apply_single(pair.spec_b.basis.adjoint(), 2, y);
  for (int g = 0; g < d; ++g) {
    const GroupElement ag = snap_element(avals[g], p);
    for (int h = 0; h < d; ++h) {
      const int beta = bi.column[index_of(mul(ag, bi.element[h], p).value, p)];
      const ComplexMatrix& f = ff.blocks[beta];
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        ComplexVector v(k);
        for (int i = 0; i < k; ++i) v(i) = y(space.index(i, g, h), c);
        const ComplexVector w = f * v;
        for (int i = 0; i < k; ++i) y(space.index(i, g, h), c) = w(i);
      }
    }
  }
  space.apply_single(pair.spec_b.basis, 2, y);
  space.apply_single(cx.basis.adjoint(), 0, y);
  for (int i = 0; i < k; ++i)
    for (int g = 0; g < d; ++g)
      for (int h = 0; h < d; ++h)
        diag(space.index(i, g, h)) = std::conj(chi_rays(cvals[i], avals[g], p));
  space.apply_diagonal(diag, y);
  space.apply_single(cx.basis, 0, y);
  space.apply_single(ua, 1, y);

  const ComplexMatrix l = select_rows(lhs, rows);
  const double scale = l.norm();
  return scale == 0.0 ? 0.0 : (l - select_rows(y, rows)).norm() / scale;
}

double stad1_residual(const CDPair& cd, const GPair& pair, double window) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const int k = cd.kdim;
  std::vector<int> all(k);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<int> idx = tensor_indices(all, bulk_indices(p, window), d);
  const ComplexMatrix chi_ca = bicharacter_factor(cd.spec_c, pair);
  const ComplexMatrix lhs = kron(cd.d, ComplexMatrix::Identity(d, d));
  const ComplexMatrix rhs = chi_ca.adjoint() * kron(cd.d, pair.a) * chi_ca;
  const double scale = compressed_norm(lhs, idx);
  return scale == 0.0 ? compressed_norm(rhs, idx) : compressed_norm(lhs - rhs, idx) / scale;
}

double round_trip_residual(const Representation& v1, const Representation& v2, double window) {
  if (v1.v.rows() != v2.v.rows() || v1.kdim != v2.kdim)
    throw ParameterError("round_trip_residual: dimension mismatch");
  const int d = v1.dim();
  std::vector<int> all(v1.kdim);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<int> idx = tensor_indices(all, bulk_indices(v1.lattice, window), d);
  return compressed_norm(v1.v - v2.v, idx) / compressed_norm(v1.v, idx);
}

Decomposition decompose(const Representation& rep, const MultUnitary& wu, const GPair& pair,
                        const QExp& f, const ResidualOptions& opts, const TolerancePolicy& policy) {
  Decomposition out;
  DecomposeReport& r = out.report;
  if (rep.unitarity > policy.unitarity) {
    r.stage = "precondition";
    r.error = "V is not unitary";
    return out;
  }
  r.rep_residual = rep_residual(rep, wu, opts).residual;
  auto stage = [&](const char* name, auto&& body) {
    if (!r.complete()) return;
    try {
      body();
    } catch (const DomainError& e) {
      r.stage = name;
      r.error = e.what();
      r.measured = e.measured();
      r.gate = e.tolerance();
    } catch (const Error& e) {
      r.stage = name;
      r.error = e.what();
    }
  };
  stage("extract_c", [&] {
    out.cx = extract_c(rep, pair, policy);
    r.slice_deviation = out.cx.slice_deviation;
    r.multiplicativity = out.cx.multiplicativity;
    r.character_residual = out.cx.character_residual;
  });
  stage("factor_f", [&] {
    out.ff = factor_f(rep, out.cx, pair, policy);
    r.off_block = out.ff.off_block;
  });
  stage("extract_d", [&] {
    out.dx = extract_d(out.ff.blocks, f, pair, policy);
    r.block_commutation = out.dx.block_commutation;
    r.ambiguous = static_cast<int>(std::count(out.dx.ambiguous.begin(), out.dx.ambiguous.end(), true));
  });
  stage("residuals", [&] {
    out.cd = make_cdpair(out.cx.c, out.dx.d, pair.lattice, policy);
    r.self_dual = out.cd.passes(policy);
    r.por1 = por1_residual(rep, out.cx, out.ff, pair);
    r.por2 = por2_residual(rep, out.cx, out.ff, pair);
    r.leg_identity = leg_identity_residual(rep, out.cx, out.ff, pair, opts.window);
    r.stad1 = stad1_residual(out.cd, pair, opts.window);
    r.round_trip = round_trip_residual(rep, build_V(out.cd, pair, f, policy), opts.window);
  });
  return out;
}

}  // namespace azb
