#include "hqm/density.hpp"

#include <cmath>
#include <sstream>

#include "hqm/errors.hpp"
#include "hqm/fd.hpp"
#include "hqm/parallel.hpp"

namespace hqm {

Cx triple_identity(const Tensor3Field& B, const HarmonicFn& u1, const HarmonicFn& u2,
                   const HarmonicFn& u3) {
  const Grid& g = B.grid();
  require(g.periodic() || vanishes_on_collar(B, 1, 0.0), ErrorKind::Precondition,
          "B must be compactly supported in the grid interior");
  const VectorField g1 = sample_gradient(u1, g);
  const VectorField g2 = sample_gradient(u2, g);
  const VectorField g3 = sample_gradient(u3, g);
  ScalarField integrand(g);
  const int d = g.dim();
  parallel_for(g.size(), [&](int64_t lo, int64_t hi) {
    for (int64_t q = lo; q < hi; ++q) {
      Cx acc{0, 0};
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l)
            acc += B.comp(j, k, l)[q] * g1.comp(j)[q] * g2.comp(k)[q] * g3.comp(l)[q];
      integrand[q] = acc;
    }
  });
  return integrate_uniform(integrand);
}

Tensor3Field symmetry_reduce(const Tensor3Field& B, SymmetryMode mode) {
  const int d = B.dim();
  Tensor3Field out(B.grid());
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        ScalarField& o = out.comp(j, k, l);
        if (mode == SymmetryMode::LastTwoSym) {
          o = B.comp(j, k, l);
          o += B.comp(j, l, k);
          o *= Cx{0.5, 0};
        } else {
          o = B.comp(j, k, l);
          o += B.comp(k, l, j);
          o += B.comp(l, j, k);
          o *= Cx{1.0 / 3.0, 0};
        }
      }
  return out;
}

StructureFit structure_fit(const Tensor3Field& B) {
  const Grid& g = B.grid();
  const int d = g.dim();
  StructureFit fit(g);
  for (int j = 0; j < d; ++j) {
    ScalarField acc(g);
    for (int k = 0; k < d; ++k) {
      if (k == j) continue;
      acc += B.comp(j, k, k);
    }
    acc *= Cx{1.0 / (d - 1), 0};
    fit.b.comp(j) = acc;
  }
  double res = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        const ScalarField& c = B.comp(j, k, l);
        for (int64_t q = 0; q < c.size(); ++q) {
          Cx recon{0, 0};
          if (k == l) recon += fit.b.comp(j)[q];
          if (j == l) recon -= fit.b.comp(k)[q];
          res = std::max(res, std::abs(c[q] - recon));
        }
      }
  fit.residual = res;
  return fit;
}

namespace {

// Deterministic orthonormal basis of the orthogonal complement of xi.
std::vector<std::vector<double>> orthonormal_complement(const std::vector<double>& xi) {
  const int d = static_cast<int>(xi.size());
  double nn = 0.0;
  for (double v : xi) nn += v * v;
  std::vector<std::vector<double>> basis;
  for (int seed = 0; seed < d && static_cast<int>(basis.size()) < d - 1; ++seed) {
    std::vector<double> v(d, 0.0);
    v[seed] = 1.0;
    double vd = 0.0;
    for (int a = 0; a < d; ++a) vd += v[a] * xi[a];
    for (int a = 0; a < d; ++a) v[a] -= vd / nn * xi[a];
    for (const auto& u : basis) {
      double uv = 0.0;
      for (int a = 0; a < d; ++a) uv += u[a] * v[a];
      for (int a = 0; a < d; ++a) v[a] -= uv * u[a];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm < 1e-12) continue;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

std::vector<RecoveredSample> calderon_recover_b(
    const Tensor3Field& B, const std::vector<std::vector<double>>& xi_samples) {
  const Grid& g = B.grid();
  const int d = g.dim();
  const StructureFit fit = structure_fit(B);
  require(fit.residual <= 1e-10 * std::max(1.0, B.max_abs()), ErrorKind::Precondition,
          "B must carry the exact b_j delta_kl - b_k delta_jl structure");

  std::vector<RecoveredSample> out;
  for (const auto& xi : xi_samples) {
    double nn = 0.0;
    for (double v : xi) nn += v * v;
    const double xi_norm = std::sqrt(nn);
    require(xi_norm > 1e-8, ErrorKind::Conditioning,
            "frequency too close to zero for recovery");
    RecoveredSample rec;
    rec.xi = xi;
    const auto nus = orthonormal_complement(xi);

    // One pair of identities per nu; the xi-projection is re-derived from
    // each and averaged.
    Cx b_xi_acc{0, 0};
    std::vector<Cx> b_nu;
    double check = 0.0;
    for (const auto& nu : nus) {
      CalderonPair pair = calderon_pair(xi, nu);
      std::vector<Cx> two_minus(d), two_plus(d);
      for (int a = 0; a < d; ++a) {
        two_minus[a] = 2.0 * pair.zeta_minus[a];
        two_plus[a] = 2.0 * pair.zeta_plus[a];
      }
      const Cx I_plus = triple_identity(B, calderon_wave(pair.zeta_plus),
                                        calderon_wave(two_minus),
                                        calderon_wave(pair.zeta_plus));
      const Cx I_minus = triple_identity(B, calderon_wave(pair.zeta_minus),
                                         calderon_wave(two_plus),
                                         calderon_wave(pair.zeta_minus));
      // I+- = -i |xi|^2 bhat(-2 xi) . zeta+-; adding gives the xi projection,
      // subtracting the nu projection (zeta+ - zeta- = i |xi| nu).
      b_xi_acc += (I_plus + I_minus) / (Cx{0, -1} * nn);
      b_nu.push_back((I_plus - I_minus) / (xi_norm * nn));

      // Assert the -i|xi|^2 constant against the direct Fourier quadrature of
      // the fitted b projected on zeta+.
      ScalarField probe(g);
      probe.fill([&](const std::vector<double>& x) {
        double ph = 0.0;
        for (int a = 0; a < d; ++a) ph += 2.0 * xi[a] * x[a];
        return std::exp(kImag * ph);
      });
      Cx direct{0, 0};
      {
        ScalarField tmp(g);
        for (int a = 0; a < d; ++a) {
          ScalarField term = fit.b.comp(a);
          term *= pair.zeta_plus[a];
          tmp += term;
        }
        for (int64_t q = 0; q < tmp.size(); ++q) tmp[q] *= probe[q];
        direct = integrate(tmp);
      }
      check = std::max(check,
                       std::abs(I_plus - Cx{0, -1} * nn * direct) /
                           std::max(1.0, std::abs(I_plus)));
    }
    rec.b_dot_xi = b_xi_acc / static_cast<double>(nus.size());
    rec.b_dot_nu = b_nu;
    rec.constant_check = check;

    rec.b_hat.assign(d, Cx{0, 0});
    for (int a = 0; a < d; ++a) rec.b_hat[a] += rec.b_dot_xi * xi[a] / nn;
    for (size_t i = 0; i < nus.size(); ++i)
      for (int a = 0; a < d; ++a) rec.b_hat[a] += rec.b_dot_nu[i] * nus[i][a];
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<double> jacobi_moment_coeffs(int jmax) {
  require(jmax >= 0 && jmax <= 200, ErrorKind::Precondition,
          "jmax limited to 200");
  // ratio_l = (2l+1)!!/(2^l l!) grows only like sqrt(l); accumulate the
  // incremental product in long double (spec: extended precision past 50).
  std::vector<long double> ratio(jmax + 1);
  ratio[0] = 1.0L;
  for (int l = 1; l <= jmax; ++l)
    ratio[l] = ratio[l - 1] * (2.0L * l + 1.0L) / (2.0L * l);
  std::vector<double> c(jmax + 1);
  for (int j = 0; j <= jmax; ++j) {
    long double acc = 0.0L;
    for (int l = 0; l <= j; ++l)
      acc += (5.0L + (((j - l) % 2 == 0) ? 1.0L : -1.0L)) * ratio[l];
    c[j] = static_cast<double>(acc);
  }
  return c;
}

double rising_factorial_coeff(double mu, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (mu + i) / (i + 1);
  return c;
}

ExperimentReport weighted_moment_expand(const std::function<double(double)>& f,
                                        double a, double b, double mu,
                                        const std::vector<double>& eps_list,
                                        const WeightedMomentOptions& opts) {
  require(b > a, ErrorKind::Precondition, "empty interval");
  require(a > 0.0 || b < 0.0, ErrorKind::Precondition,
          "interval must not contain the origin");
  require(mu > 0.0, ErrorKind::Precondition, "mu must be positive");
  const double dist = std::min(std::fabs(a), std::fabs(b));
  ExperimentReport rep("weighted-moment-expand", 0);
  rep.set_param("mu", mu);
  rep.set_param("terms", static_cast<double>(opts.terms));

  const int n = opts.samples | 1;  // odd sample count for Simpson
  const double h = (b - a) / (n - 1);
  const auto w = quadrature_weights_1d(n, h, false);

  require(a > 0.0, ErrorKind::Precondition,
          "positive intervals only (t^{-mu} branch)");

  // Moment integrals int f t^{-mu-k} dt and int |f| t^{-mu-k} dt.
  std::vector<double> moment(opts.terms + 40, 0.0), abs_moment(opts.terms + 40, 0.0);
  for (int i = 0; i < n; ++i) {
    const double t = a + i * h;
    const double fv = f(t);
    double tp = std::pow(t, -mu);
    for (size_t k = 0; k < moment.size(); ++k) {
      moment[k] += w[i] * fv * tp;
      abs_moment[k] += w[i] * std::fabs(fv) * tp;
      tp /= t;
    }
  }

  for (double eps : eps_list) {
    require(eps > 0.0 && eps < dist, ErrorKind::Precondition,
            "series diverges: eps must be below dist(0, I)");
    Cx lhs{0, 0};
    for (int i = 0; i < n; ++i) {
      const double t = a + i * h;
      lhs += w[i] * f(t) * std::pow(Cx{t, -eps}, -mu);
    }
    Cx series{0, 0};
    for (int k = 0; k < opts.terms; ++k)
      series += std::pow(Cx{0, eps}, k) * rising_factorial_coeff(mu, k) * moment[k];
    // Tail bound: geometric envelope of the omitted terms.
    double tail = 0.0;
    double geo = 1.0;
    for (int k = opts.terms; k < opts.terms + 40; ++k)
      tail += std::pow(eps, k) * rising_factorial_coeff(mu, k) * abs_moment[k];
    geo = eps / dist;
    tail += std::pow(eps, opts.terms + 40) *
            rising_factorial_coeff(mu, opts.terms + 40) *
            abs_moment[opts.terms + 39] * dist / std::max(1e-300, 1.0 - geo);
    std::ostringstream tag;
    tag.precision(6);
    tag << "agreement_eps_" << eps;
    rep.add_metric(metric_le(tag.str(), std::abs(lhs - series),
                             tail + 1e-10 * (1.0 + std::abs(lhs))));
  }
  return rep;
}

}  // namespace hqm
