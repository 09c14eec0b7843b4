#include "hqm/lincal.hpp"

#include <cmath>

#include "hqm/dst.hpp"
#include "hqm/errors.hpp"
#include "hqm/fd.hpp"
#include "hqm/parallel.hpp"

namespace hqm {

namespace {

int levi_civita(int j, int k, int l) {
  if (j == k || k == l || j == l) return 0;
  const int even[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& p : even)
    if (j == p[0] && k == p[1] && l == p[2]) return 1;
  return -1;
}

}  // namespace

void validate_obstruction(const ObstructionPair& pair, double div_tol) {
  const Grid& g = pair.v.grid();
  const int d = g.dim();
  for (int a = 0; a < d; ++a)
    require(vanishes_on_collar(pair.v.comp(a), kCollarCells, 0.0),
            ErrorKind::Precondition, "v must vanish on the boundary collar");
  double scale = std::max(1.0, pair.a.max_abs());
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      const ScalarField& ajk = pair.a.comp(j, k);
      const ScalarField& akj = pair.a.comp(k, j);
      for (int64_t q = 0; q < ajk.size(); ++q)
        require(std::abs(ajk[q] + akj[q]) <= 1e-14 * scale, ErrorKind::Precondition,
                "a must be exactly antisymmetric");
    }
  // Interior discrete row divergence (compact support makes the total flux
  // vanish automatically).
  for (int k = 0; k < d; ++k) {
    ScalarField div(g);
    for (int j = 0; j < d; ++j) div += derivative(pair.a.comp(j, k), j, 1);
    require(div.max_abs() <= div_tol * scale, ErrorKind::Precondition,
            "rows of a must be discretely divergence-free");
  }
}

Tensor2Field build_obstruction(const ObstructionPair& pair) {
  validate_obstruction(pair);
  const Grid& g = pair.v.grid();
  const int d = g.dim();
  std::vector<std::vector<ScalarField>> dv;  // dv[j][k] = d_j v_k
  dv.resize(d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) dv[j].push_back(derivative(pair.v.comp(k), j, 1));
  ScalarField div(g);
  for (int j = 0; j < d; ++j) div += dv[j][j];

  Tensor2Field C(g);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      ScalarField& c = C.comp(j, k);
      c = dv[j][k];
      c += dv[k][j];
      if (j == k) c -= div;
      c += pair.a.comp(j, k);
    }
  return C;
}

AnalyticObstruction make_obstruction(const Grid& g,
                                     const std::vector<AnalyticScalar>& v_comps,
                                     const std::vector<AnalyticScalar>& curl_potentials) {
  const int d = g.dim();
  require(static_cast<int>(v_comps.size()) == d, ErrorKind::Precondition,
          "v component count mismatch");
  require(curl_potentials.empty() || d == 3, ErrorKind::Precondition,
          "curl-potential antisymmetric parts are generated in dim 3");
  AnalyticObstruction out(g);

  for (int a = 0; a < d; ++a)
    out.pair.v.comp(a) = sample_scalar(g, v_comps[a]);

  // a_jk = sum over potentials of eps_jkl d_l phi; rows are divergence-free
  // because mixed partials commute (exactly so for the sampled FD route,
  // where the 1d stencils along different axes commute).
  for (const auto& phi : curl_potentials) {
    ScalarField sphi = sample_scalar(g, phi);
    std::vector<ScalarField> dphi_fd;
    for (int l = 0; l < d; ++l) dphi_fd.push_back(derivative(sphi, l, 1));
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const int e = levi_civita(j, k, l);
          if (e == 0) continue;
          ScalarField term = dphi_fd[l];
          term *= Cx{static_cast<double>(e), 0};
          out.pair.a.comp(j, k) += term;
        }
  }

  // Analytic assembly of C from the closed-form Jacobians.
  const int64_t n = g.size();
  parallel_for(n, [&](int64_t lo, int64_t hi) {
    std::vector<int> ix;
    for (int64_t q = lo; q < hi; ++q) {
      ix = g.unindex(q);
      const auto x = g.point(ix);
      std::vector<std::vector<double>> J(d, std::vector<double>(d, 0.0));
      for (int k = 0; k < d; ++k) {
        const auto gk = v_comps[k].grad(x);
        for (int j = 0; j < d; ++j) J[j][k] = gk[j];  // J[j][k] = d_j v_k
      }
      double div = 0.0;
      for (int j = 0; j < d; ++j) div += J[j][j];
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double c = J[j][k] + J[k][j];
          if (j == k) c -= div;
          out.C.comp(j, k)[q] = Cx{c, 0};
        }
      for (const auto& phi : curl_potentials) {
        const auto gp = phi.grad(x);
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
              const int e = levi_civita(j, k, l);
              if (e != 0) out.C.comp(j, k)[q] += Cx{e * gp[l], 0};
            }
      }
    }
  });
  return out;
}

AnalyticObstruction random_obstruction_plant(const Grid& g, Rng& rng, bool with_a,
                                             int alpha) {
  std::vector<AnalyticScalar> v;
  for (int a = 0; a < g.dim(); ++a) {
    std::vector<double> center(g.dim()), radius(g.dim());
    for (int b = 0; b < g.dim(); ++b) {
      const double span = g.hi(b) - g.lo(b);
      // Wide supports: the spectral tail (hence the identity-gate error)
      // shrinks fast in the radius, and 0.5 - 0.015 - 0.40 still clears the
      // 3-cell collar at 33^3.
      center[b] = 0.5 * (g.lo(b) + g.hi(b)) + rng.uniform(-0.015, 0.015) * span;
      radius[b] = rng.uniform(0.34, 0.40) * span;
    }
    AnalyticScalar bump = bump_scalar(center, radius, alpha);
    const double amp = rng.uniform(0.3, 1.0) * (rng.uniform(0, 1) > 0.5 ? 1.0 : -1.0);
    AnalyticScalar scaled;
    scaled.value = [bump, amp](const std::vector<double>& x) {
      return amp * bump.value(x);
    };
    scaled.grad = [bump, amp](const std::vector<double>& x) {
      auto gr = bump.grad(x);
      for (double& q : gr) q *= amp;
      return gr;
    };
    v.push_back(scaled);
  }
  std::vector<AnalyticScalar> pots;
  if (with_a && g.dim() == 3) {
    AnalyticScalar phi = box_bump(g, 0.62, alpha);
    const double amp = rng.uniform(-1.0, 1.0);
    AnalyticScalar scaled;
    scaled.value = [phi, amp](const std::vector<double>& x) {
      return amp * phi.value(x);
    };
    scaled.grad = [phi, amp](const std::vector<double>& x) {
      auto gr = phi.grad(x);
      for (double& q : gr) q *= amp;
      return gr;
    };
    pots.push_back(scaled);
  }
  return make_obstruction(g, v, pots);
}

Cx double_identity(const Tensor2Field& C, const HarmonicFn& u1, const HarmonicFn& u2) {
  return double_identity(C, sample_gradient(u1, C.grid()),
                         sample_gradient(u2, C.grid()));
}

Cx double_identity(const Tensor2Field& C, const VectorField& grad_u1,
                   const VectorField& grad_u2) {
  const Grid& g = C.grid();
  ScalarField integrand(g);
  const int d = g.dim();
  parallel_for(g.size(), [&](int64_t lo, int64_t hi) {
    for (int64_t q = lo; q < hi; ++q) {
      Cx acc{0, 0};
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          acc += C.comp(j, k)[q] * grad_u1.comp(j)[q] * grad_u2.comp(k)[q];
      integrand[q] = acc;
    }
  });
  return integrate_uniform(integrand);
}

Decomposition decompose(const Tensor2Field& C) {
  const Grid& g = C.grid();
  require(!g.periodic(), ErrorKind::Precondition, "decompose runs on box grids");
  require(vanishes_on_collar(C, 1, 0.0), ErrorKind::Precondition,
          "C must be compactly supported in the grid interior");
  const int d = g.dim();
  Decomposition out(g);

  Tensor2Field Cs(g);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      ScalarField s = C.comp(j, k);
      s += C.comp(k, j);
      s *= Cx{0.5, 0};
      Cs.comp(j, k) = s;
      ScalarField a = C.comp(j, k);
      a -= C.comp(k, j);
      a *= Cx{0.5, 0};
      out.a.comp(j, k) = a;  // pointwise projection, exact
    }

  // v_j = sum_k G0(d_k C^s_jk).
  for (int j = 0; j < d; ++j) {
    ScalarField src(g);
    for (int k = 0; k < d; ++k) src += derivative(Cs.comp(j, k), k, 1);
    out.v.comp(j) = green_dirichlet(src);
  }

  // B = C^s - (sym grad v - delta div v).
  std::vector<std::vector<ScalarField>> dv(d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) dv[j].push_back(derivative(out.v.comp(k), j, 1));
  ScalarField div(g);
  for (int j = 0; j < d; ++j) div += dv[j][j];
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      ScalarField b = Cs.comp(j, k);
      b -= dv[j][k];
      b -= dv[k][j];
      if (j == k) b += div;
      out.B_residual.comp(j, k) = b;
    }

  // Row divergences of the antisymmetric part: discrete max-norm and a
  // Fourier-side sample over low lattice frequencies of the zero extension.
  double disc = 0.0;
  for (int k = 0; k < d; ++k) {
    ScalarField rd(g);
    for (int j = 0; j < d; ++j) rd += derivative(out.a.comp(j, k), j, 1);
    disc = std::max(disc, rd.max_abs());
  }
  out.discrete_row_divergence = disc;

  double four = 0.0;
  const double norm_a = std::max(out.a.max_abs(), 1e-300) * g.volume();
  std::vector<std::vector<double>> freqs;
  std::vector<int> counter(d, -1);
  while (true) {
    bool all_zero = true;
    for (int a = 0; a < d; ++a)
      if (counter[a] != 0) all_zero = false;
    if (!all_zero) {
      std::vector<double> xi(d);
      for (int a = 0; a < d; ++a)
        xi[a] = 2.0 * M_PI * counter[a] / (g.hi(a) - g.lo(a));
      freqs.push_back(xi);
    }
    int a = d - 1;
    while (a >= 0 && counter[a] == 1) counter[a--] = -1;
    if (a < 0) break;
    ++counter[a];
  }
  for (const auto& xi : freqs) {
    ScalarField wave(g);
    wave.fill([&](const std::vector<double>& x) {
      double ph = 0.0;
      for (int a = 0; a < d; ++a) ph += xi[a] * x[a];
      return std::exp(Cx{0, -ph});
    });
    for (int k = 0; k < d; ++k) {
      Cx acc{0, 0};
      for (int j = 0; j < d; ++j) {
        ScalarField t = out.a.comp(j, k);
        for (int64_t q = 0; q < t.size(); ++q) t[q] *= wave[q];
        acc += xi[j] * integrate(t);
      }
      four = std::max(four, std::abs(acc) / norm_a);
    }
  }
  out.fourier_row_divergence = four;
  return out;
}

ScalarField mollify(const ScalarField& f, double width) {
  const Grid& g = f.grid();
  ScalarField out = f;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double h = g.spacing(axis);
    const int half = std::max(1, static_cast<int>(std::ceil(4.0 * width / h)));
    std::vector<double> w(2 * half + 1);
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
      w[i + half] = std::exp(-0.5 * sq(i * h / width));
      sum += w[i + half];
    }
    for (double& x : w) x /= sum;

    const int n = g.res(axis);
    int64_t stride = 1;
    for (int a = axis + 1; a < g.dim(); ++a) stride *= g.res(a);
    const int64_t lines = g.size() / n;
    ScalarField next(g);
    auto& in = out.data();
    auto& ov = next.data();
    parallel_for(lines, [&](int64_t lb, int64_t le) {
      for (int64_t line = lb; line < le; ++line) {
        const int64_t base = (line / stride) * stride * n + (line % stride);
        for (int i = 0; i < n; ++i) {
          Cx acc{0, 0};
          for (int q = -half; q <= half; ++q) {
            const int jj = i + q;
            if (jj < 0 || jj >= n) continue;  // zero extension
            acc += w[q + half] * in[base + static_cast<int64_t>(jj) * stride];
          }
          ov[base + static_cast<int64_t>(i) * stride] = acc;
        }
      }
    });
    out = std::move(next);
  }
  return out;
}

Tensor2Field mollify(const Tensor2Field& f, double width) {
  Tensor2Field out(f.grid());
  for (int j = 0; j < f.dim(); ++j)
    for (int k = 0; k < f.dim(); ++k) out.comp(j, k) = mollify(f.comp(j, k), width);
  return out;
}

AnalyticVector bump_vector(const Grid& g, const std::vector<double>& amplitudes) {
  const int d = g.dim();
  require(static_cast<int>(amplitudes.size()) == d, ErrorKind::Precondition,
          "amplitude count mismatch");
  std::vector<AnalyticScalar> comps;
  for (int a = 0; a < d; ++a) {
    std::vector<double> center(d), radius(d);
    for (int b = 0; b < d; ++b) {
      const double span = g.hi(b) - g.lo(b);
      center[b] = 0.5 * (g.lo(b) + g.hi(b)) + 0.05 * span * ((a + b) % 2 ? 1 : -1);
      radius[b] = 0.35 * span;
    }
    comps.push_back(bump_scalar(center, radius));
  }
  AnalyticVector v;
  v.value = [comps, amplitudes, d](const std::vector<double>& x) {
    std::vector<double> out(d);
    for (int a = 0; a < d; ++a) out[a] = amplitudes[a] * comps[a].value(x);
    return out;
  };
  v.jacobian = [comps, amplitudes, d](const std::vector<double>& x) {
    std::vector<std::vector<double>> J(d, std::vector<double>(d, 0.0));
    for (int k = 0; k < d; ++k) {
      const auto grad = comps[k].grad(x);
      for (int j = 0; j < d; ++j) J[j][k] = amplitudes[k] * grad[j];  // d_j v_k
    }
    return J;
  };
  return v;
}

namespace {

struct FlowResult {
  std::vector<std::vector<double>> I_t;  // pushforward of the identity
  double detJ;
};

FlowResult flow_pushforward(const AnalyticVector& v, const Grid& g,
                            std::vector<double> x, double t) {
  const int d = static_cast<int>(x.size());
  std::vector<std::vector<double>> J(d, std::vector<double>(d, 0.0));
  for (int a = 0; a < d; ++a) J[a][a] = 1.0;

  const int steps = 64;
  const double h = t / steps;
  auto deriv = [&](const std::vector<double>& pos,
                   const std::vector<std::vector<double>>& Jm) {
    const auto vel = v.value(pos);
    const auto Dv = v.jacobian(pos);
    std::vector<std::vector<double>> dJ(d, std::vector<double>(d, 0.0));
    // dJ/ds[j][k] = sum_m d_m v_j ... rows are x-derivatives of Phi:
    // J[j][k] = d Phi_j / d x_k, so J' = (Dv o Phi) J with (Dv)_{jm} = d_m v_j.
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double acc = 0.0;
        for (int m = 0; m < d; ++m) acc += Dv[m][j] * Jm[m][k];
        dJ[j][k] = acc;
      }
    return std::make_pair(vel, dJ);
  };

  auto axpy = [&](std::vector<double>& pos, std::vector<std::vector<double>>& Jm,
                  const std::pair<std::vector<double>, std::vector<std::vector<double>>>& k,
                  double c) {
    for (int a = 0; a < d; ++a) pos[a] += c * k.first[a];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) Jm[a][b] += c * k.second[a][b];
  };

  for (int s = 0; s < steps; ++s) {
    const auto k1 = deriv(x, J);
    auto x2 = x;
    auto J2 = J;
    axpy(x2, J2, k1, 0.5 * h);
    const auto k2 = deriv(x2, J2);
    auto x3 = x;
    auto J3 = J;
    axpy(x3, J3, k2, 0.5 * h);
    const auto k3 = deriv(x3, J3);
    auto x4 = x;
    auto J4 = J;
    axpy(x4, J4, k3, h);
    const auto k4 = deriv(x4, J4);
    for (int a = 0; a < d; ++a)
      x[a] += h / 6.0 * (k1.first[a] + 2 * k2.first[a] + 2 * k3.first[a] + k4.first[a]);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        J[a][b] += h / 6.0 * (k1.second[a][b] + 2 * k2.second[a][b] +
                              2 * k3.second[a][b] + k4.second[a][b]);
    for (int a = 0; a < d; ++a)
      require(x[a] >= g.lo(a) && x[a] <= g.hi(a), ErrorKind::Precondition,
              "flow exits the domain: reduce t or the field amplitude");
  }

  // det and inverse-free assembly of [det]^{-1} J^T J.
  double det = 0.0;
  if (d == 2) {
    det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  } else if (d == 3) {
    det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
          J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
          J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
  } else {
    throw Error(ErrorKind::Precondition, "pushforward implemented for dim 2 and 3");
  }
  FlowResult out;
  out.detJ = det;
  out.I_t.assign(d, std::vector<double>(d, 0.0));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double acc = 0.0;
      for (int m = 0; m < d; ++m) acc += J[m][j] * J[m][k];
      out.I_t[j][k] = acc / det;
    }
  return out;
}

}  // namespace

ExperimentReport tartar_linearization(const AnalyticVector& v, const Grid& g,
                                      const std::vector<double>& t_list,
                                      std::vector<std::vector<double>>* rows) {
  require(t_list.size() >= 4, ErrorKind::Precondition,
          "need at least 4 t values for the slope fit");
  ExperimentReport rep("tartar-linearization", 0);

  // Interior sample lattice (about 6^dim points).
  std::vector<std::vector<double>> samples;
  const int per_axis = 6;
  std::vector<int> ctr(g.dim(), 0);
  while (true) {
    std::vector<double> x(g.dim());
    for (int a = 0; a < g.dim(); ++a) {
      const double f = (ctr[a] + 1.0) / (per_axis + 1.0);
      x[a] = g.lo(a) + f * (g.hi(a) - g.lo(a));
    }
    samples.push_back(x);
    int a = g.dim() - 1;
    while (a >= 0 && ctr[a] == per_axis - 1) ctr[a--] = 0;
    if (a < 0) break;
    ++ctr[a];
  }

  std::vector<double> resid, dresid;
  for (double t : t_list) {
    double worst = 0.0, dworst = 0.0;
    for (const auto& x : samples) {
      const auto push = flow_pushforward(v, g, x, t);
      const auto Dv = v.jacobian(x);
      double div = 0.0;
      for (int a = 0; a < g.dim(); ++a) div += Dv[a][a];
      double frob = 0.0;
      for (int j = 0; j < g.dim(); ++j)
        for (int k = 0; k < g.dim(); ++k) {
          double lin = Dv[j][k] + Dv[k][j];
          if (j == k) lin -= div;
          const double r = push.I_t[j][k] - (j == k ? 1.0 : 0.0) - t * lin;
          frob += r * r;
        }
      worst = std::max(worst, std::sqrt(frob));
      dworst = std::max(dworst, std::fabs(push.detJ - 1.0 - t * div));
    }
    resid.push_back(worst);
    dresid.push_back(dworst);
    if (rows) rows->push_back({t, worst, dworst});
  }
  auto ts = t_list;
  const SlopeFit rf = fit_slope(ts, resid);
  const SlopeFit df = fit_slope(ts, dresid);
  rep.add_metric(metric_abs("pushforward_residual_slope", rf.slope, 2.0, 0.1));
  rep.add_metric(metric_abs("det_residual_slope", df.slope, 2.0, 0.1));
  return rep;
}

}  // namespace hqm
