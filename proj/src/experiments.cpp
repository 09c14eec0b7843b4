#include "hqm/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "hqm/density.hpp"
#include "hqm/errors.hpp"
#include "hqm/fd.hpp"
#include "hqm/jet.hpp"
#include "hqm/lincal.hpp"
#include "hqm/linalg.hpp"
#include "hqm/plants.hpp"
#include "hqm/qls.hpp"
#include "hqm/quasimode.hpp"
#include "hqm/rng.hpp"
#include "hqm/stationary.hpp"

#include "json.hpp"

namespace hqm {

namespace {

using nlohmann::json;

struct Ctx {
  json cfg;
  std::string out_dir;
  std::uint64_t seed = 0;

  double num(const std::string& key, double fallback) const {
    return cfg.value(key, fallback);
  }
  int integer(const std::string& key, int fallback) const {
    return cfg.value(key, fallback);
  }

  std::string csv_path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
};

void emit_csv(ExperimentReport& rep, const Ctx& ctx, const std::string& name,
              const std::vector<std::string>& cols,
              const std::vector<std::vector<double>>& rows) {
  const std::string path = ctx.csv_path(name);
  write_csv(path, cols, rows);
  rep.add_artifact(path);
}

// ---------------------------------------------------------------- quasimode

QuasimodeParams quasimode_params_from(const Ctx& ctx, Rng& rng) {
  QuasimodeParams p;
  p.M = ctx.integer("M", 4);
  p.eps = ctx.num("eps", rng.uniform(0.4, 0.8));
  p.delta = ctx.num("delta", 0.25);
  p.sigma = ctx.num("sigma", 0.0);
  p.p3 = rng.complex_in_disk(0.1) + Cx{0.08, 0};
  p.p4 = rng.complex_in_disk(0.15);
  p.p5 = rng.complex_in_disk(0.15);
  p.q1 = rng.complex_in_disk(0.5);
  p.x1_lo = ctx.num("x1_lo", 0.7);
  p.x1_hi = ctx.num("x1_hi", 1.8);
  return p;
}

ExperimentReport run_quasimode_residual(const Ctx& ctx) {
  Rng rng(ctx.seed);
  QuasimodeParams p = quasimode_params_from(ctx, rng);
  PhaseHierarchy phase = build_phase(p);
  AmplitudeHierarchy ampl = build_amplitude(p, phase);

  Grid grid(std::vector<double>{-0.5, p.x1_lo, -p.delta},
            std::vector<double>{0.5, p.x1_hi, p.delta},
            std::vector<int>{8, 16, 16});
  ResidualOptions opt = default_residual_options(p);
  ResidualTables tables;
  ExperimentReport rep = conjugated_residual(p, phase, ampl, grid, opt, &tables);

  // Closed-form reproduction of the psi table and the amplitude heads.
  auto spow = [&](double x1, double e) { return std::pow(Cx{x1, -p.eps}, e); };
  double closed_err = 0.0;
  for (double x1 : {p.x1_lo + 0.1, 1.0, p.x1_hi - 0.1}) {
    closed_err = std::max(closed_err,
                          std::abs(phase.psi_at(2, x1) - 0.5 * spow(x1, -1)));
    closed_err =
        std::max(closed_err, std::abs(phase.psi_at(3, x1) - p.p3 * spow(x1, -3)));
    closed_err = std::max(
        closed_err, std::abs(phase.psi_at(4, x1) - (-0.125 * spow(x1, -3) +
                                                    4.5 * p.p3 * p.p3 * spow(x1, -5) +
                                                    p.p4 * spow(x1, -4))));
    if (p.M >= 5)
      closed_err = std::max(
          closed_err,
          std::abs(phase.psi_at(5, x1) -
                   (27.0 * p.p3 * p.p3 * p.p3 * spow(x1, -7) +
                    12.0 * p.p3 * p.p4 * spow(x1, -6) + p.p5 * spow(x1, -5))));
    closed_err = std::max(closed_err, std::abs(ampl.v_at(0, 0, x1) - spow(x1, -0.5)));
    closed_err = std::max(closed_err,
                          std::abs(ampl.v_at(0, 1, x1) - (3.0 * p.p3 * spow(x1, -2.5) +
                                                          p.q1 * spow(x1, -1.5))));
  }
  rep.add_metric(metric_le("closed_form_max_err", closed_err, 1e-9));

  ConditionResiduals cres = condition_residuals(p, phase, ampl);
  rep.add_metric(metric_le("condition_residual_max", cres.max_residual, 1e-9));

  emit_csv(rep, ctx, "quasimode_x2_sweep.csv", {"x2", "eikonal_abs", "transport0_abs"},
           tables.x2_rows);
  emit_csv(rep, ctx, "quasimode_lambda_sweep.csv", {"lambda", "residual_l1"},
           tables.lambda_rows);
  return rep;
}

// ----------------------------------------------------------- stationary

ExperimentReport run_stationary_phase(const Ctx& ctx) {
  Rng rng(ctx.seed);
  ExperimentReport rep("stationary-phase", ctx.seed);

  // Gaussian-oracle expansion error rates.
  auto Ufn = [](double t) { return Cx{std::exp(0.5 * t), 0}; };
  auto Ffn = [](double t) { return Cx{0, t * t}; };
  Jet Uj(22);
  double fact = 1.0;
  for (int k = 0; k <= 22; ++k) {
    if (k > 0) fact *= k;
    Uj.coeff(k) = Cx{std::pow(0.5, k) / fact, 0};
  }
  Jet Fj(22);
  Fj.coeff(2) = Cx{0, 1};

  QuadratureOptions qopts;
  qopts.abs_tol = 1e-13;
  const std::vector<double> lambdas{6, 12, 24, 48, 96};
  std::vector<std::vector<double>> sweep_rows;
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> rel;
    for (double lambda : lambdas) {
      const Cx quad = oscillatory_quadrature(Ffn, Ufn, lambda, -10, 10, qopts);
      const Cx exp_k = stationary_expansion(Fj, Uj, lambda, k);
      const double err = std::abs(quad - exp_k) / std::sqrt(M_PI / lambda);
      rel.push_back(err);
      sweep_rows.push_back({static_cast<double>(k), lambda, quad.real(), exp_k.real(),
                            err});
    }
    const SlopeFit f = fit_slope(lambdas, rel);
    rep.add_metric(metric_le("gaussian_rate_k" + std::to_string(k), f.slope,
                             -static_cast<double>(k) + 0.3));
  }

  // Specialized L1/L2 vs the operator route, plus the literal-text variants.
  double d1 = 0.0, d2 = 0.0, lit1 = 1e300, lit2 = 1e300;
  for (int t = 0; t < 100; ++t) {
    const double x1 = rng.uniform(0.4, 2.0);
    const double eps = rng.uniform(0.2, 1.0);
    Jet U(16);
    for (int k = 0; k <= 16; ++k) U.coeff(k) = rng.complex_in_disk(1.0);
    PhaseProfile prof = make_phase_profile(x1, eps);
    const Cx g1 = lj_general(prof.F2_jet, U, 1);
    const Cx g2 = lj_general(prof.F2_jet, U, 2);
    d1 = std::max(d1, std::abs(g1 - lj_specialized(U, x1, eps, 1)) /
                          std::max(1.0, std::abs(g1)));
    d2 = std::max(d2, std::abs(g2 - lj_specialized(U, x1, eps, 2)) /
                          std::max(1.0, std::abs(g2)));
    lit1 = std::min(lit1, std::abs(g1 - l1_literal_variant(U, x1, eps)) /
                              std::max(1.0, std::abs(g1)));
    lit2 = std::min(lit2, std::abs(g2 - l2_literal_variant(U, x1, eps)) /
                              std::max(1.0, std::abs(g2)));
  }
  rep.add_metric(metric_le("specialized_vs_general_L1", d1, 1e-10));
  rep.add_metric(metric_le("specialized_vs_general_L2", d2, 1e-10));
  // The printed-text variants stay bounded away from the operator route:
  // this is the typo adjudication, reported rather than silently corrected.
  rep.add_metric(metric_ge("literal_L1_min_gap", lit1, 1e-6));
  rep.add_metric(metric_ge("literal_L2_min_gap", lit2, 1e-6));

  const Cx pref = expansion_prefactor(1.0, 0.5, 100.0);
  rep.add_metric(metric_abs("prefactor_value", pref.real(),
                            std::sqrt(M_PI * 1.25 / 100.0), 1e-12));

  emit_csv(rep, ctx, "stationary_sweep.csv",
           {"k", "lambda", "quad_re", "expansion_re", "rel_error"}, sweep_rows);
  return rep;
}

// ------------------------------------------------------------- density

ExperimentReport run_density_check(const Ctx& ctx) {
  Rng rng(ctx.seed);
  ExperimentReport rep("density-check", ctx.seed);
  const int res = ctx.integer("resolution", 32);
  const int mmax = ctx.integer("band_limit", 2);

  // Structure recovery through the Calderon-pair identities on the torus.
  Grid torus = Grid::cube(3, 0.0, 1.0, res, /*periodic=*/true);
  std::vector<TrigPoly> b;
  std::vector<AnalyticScalar> b_scalar;
  for (int a = 0; a < 3; ++a) {
    b.push_back(TrigPoly::random(torus, mmax, rng, 0.5));
    b_scalar.push_back(b.back().as_scalar());
  }
  Tensor3Field B = plant_structure(torus, b_scalar);
  std::vector<std::vector<double>> xis;
  const int xi_count = ctx.integer("xi_count", 8);
  while (static_cast<int>(xis.size()) < xi_count) {
    std::vector<double> m(3);
    bool zero = true;
    for (int a = 0; a < 3; ++a) {
      const int q = rng.uniform_int(-mmax, mmax);
      m[a] = M_PI * q;
      if (q != 0) zero = false;
    }
    if (!zero) xis.push_back(m);
  }
  auto recs = calderon_recover_b(B, xis);
  double rec_err = 0.0, const_check = 0.0;
  std::vector<std::vector<double>> rec_rows;
  for (const auto& rec : recs) {
    std::vector<double> minus2xi(3);
    for (int a = 0; a < 3; ++a) minus2xi[a] = -2.0 * rec.xi[a];
    double scale = 1e-3;
    std::vector<Cx> oracle(3);
    for (int a = 0; a < 3; ++a) {
      oracle[a] = b[a].fourier(minus2xi);
      scale = std::max(scale, std::abs(oracle[a]));
    }
    for (int a = 0; a < 3; ++a)
      rec_err = std::max(rec_err, std::abs(rec.b_hat[a] - oracle[a]) / scale);
    const_check = std::max(const_check, rec.constant_check);
    rec_rows.push_back({rec.xi[0], rec.xi[1], rec.xi[2], rec.b_hat[0].real(),
                        rec.b_hat[0].imag(), rec.b_hat[1].real(), rec.b_hat[1].imag(),
                        rec.b_hat[2].real(), rec.b_hat[2].imag()});
  }
  rep.add_metric(metric_le("recovery_rel_err", rec_err, 1e-6));
  rep.add_metric(metric_le("fourier_constant_check", const_check, 1e-8));

  // Levi-Civita plant: zero fitted b, full residual.
  Grid box = Grid::cube(3, 0.0, 1.0, std::max(17, res / 2 | 1));
  AnalyticScalar bump = box_bump(box, 0.7);
  Tensor3Field lc = plant_levi_civita(box, bump);
  StructureFit lcfit = structure_fit(lc);
  rep.add_metric(metric_le("levi_civita_fitted_b", lcfit.b.max_abs(), 1e-13));
  rep.add_metric(metric_abs("levi_civita_residual", lcfit.residual, lc.max_abs(),
                            1e-12 * std::max(1.0, lc.max_abs())));

  // Moment lemmas.
  auto coeffs = jacobi_moment_coeffs(50);
  rep.add_metric(metric_abs("moment_c0", coeffs[0], 6.0, 1e-12));
  rep.add_metric(metric_abs("moment_c1", coeffs[1], 13.0, 1e-12));
  double min_c = 1e300;
  for (double c : coeffs) min_c = std::min(min_c, c);
  rep.add_metric(metric_ge("moment_min_coeff", min_c, 1e-6));

  ExperimentReport wm = weighted_moment_expand([](double) { return 1.0; }, 1.0, 2.0,
                                               1.0, {0.05, 0.1});
  rep.add_metric(metric_ge("weighted_moment_pass", wm.pass() ? 1.0 : 0.0, 1.0));

  // Dictionary-projection density evidence: least-squares residual of fixed
  // tensors against gradient-product dictionaries of growing size. Labeled
  // evidence only: the full density statement quantifies over all harmonic
  // triples, which is not machine checkable, and desk-scale decay is slow.
  // The gated target is the structure class the recovery argument handles;
  // a generic random tensor's residuals are reported without a gate.
  Grid small = Grid::cube(3, 0.0, 1.0, 9);
  AnalyticScalar sb = box_bump(small, 0.8);
  AnalyticScalar zero_fn;
  zero_fn.value = [](const std::vector<double>&) { return 0.0; };
  zero_fn.grad = [](const std::vector<double>& x) {
    return std::vector<double>(x.size(), 0.0);
  };
  Tensor3Field target = plant_structure(small, {sb, zero_fn, zero_fn});
  Tensor3Field generic(small);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const double c = rng.uniform(-1, 1);
        generic.comp(j, k, l).fill([&](const std::vector<double>& x) {
          return Cx{c * sb.value(x) * std::cos(x[0] + 2 * x[1] - x[2]), 0};
        });
      }
  std::vector<HarmonicFn> dict_fns;
  for (auto& f : harmonic_polynomials(3, 3))
    if (f.descriptor.find("degree=0") == std::string::npos)
      dict_fns.push_back(std::move(f));  // constants have zero gradient
  while (dict_fns.size() < 28) {
    std::vector<double> xi = rng.unit_vector(3);
    for (double& q : xi) q *= rng.uniform(1.0, 6.0);
    std::vector<double> nu = rng.unit_vector(3);
    double xn = 0, vd = 0;
    for (int a = 0; a < 3; ++a) { xn += xi[a] * xi[a]; vd += xi[a] * nu[a]; }
    double norm = 0;
    for (int a = 0; a < 3; ++a) { nu[a] -= vd / xn * xi[a]; norm += nu[a] * nu[a]; }
    if (norm < 1e-6) continue;
    norm = std::sqrt(norm);
    for (double& q : nu) q /= norm;
    CalderonPair cp = calderon_pair(xi, nu);
    dict_fns.push_back(calderon_wave(cp.zeta_plus));
    dict_fns.push_back(calderon_wave(cp.zeta_minus));
  }
  // Gradient-product dictionary entries grad u1 (x) grad u2 (x) grad u3.
  std::vector<VectorField> grads;
  for (const auto& f : dict_fns) grads.push_back(sample_gradient(f, small));
  const int64_t npts = small.size();
  const int ncomp = 27;
  auto residual_for = [&](const Tensor3Field& tgt, int count) {
    // Triples ordered by total index so small dictionaries already mix the
    // three slots.
    std::vector<std::array<int, 3>> entries;
    const int nf = static_cast<int>(grads.size());
    for (int s = 0; s <= 3 * (nf - 1) && static_cast<int>(entries.size()) < count; ++s)
      for (int a = 0; a <= std::min(s, nf - 1); ++a)
        for (int bq = 0; bq <= std::min(s - a, nf - 1); ++bq) {
          const int c = s - a - bq;
          if (c < 0 || c >= nf) continue;
          if (static_cast<int>(entries.size()) >= count) break;
          entries.push_back({a, bq, c});
        }
    const int n = static_cast<int>(entries.size());
    const int64_t rows = npts * ncomp;
    std::vector<Cx> Amat(rows * n), bvec(rows);
    for (int64_t q = 0; q < npts; ++q) {
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const int64_t r = q * ncomp + (j * 3 + k) * 3 + l;
            bvec[r] = tgt.comp(j, k, l)[q];
            for (int e = 0; e < n; ++e) {
              const auto& [ia, ib, ic] = entries[e];
              Amat[r * n + e] = grads[ia].comp(j)[q] * grads[ib].comp(k)[q] *
                                grads[ic].comp(l)[q];
            }
          }
    }
    auto x = least_squares(Amat, bvec, static_cast<int>(rows), n);
    double rss = 0.0, tss = 0.0;
    for (int64_t r = 0; r < rows; ++r) {
      Cx fit{0, 0};
      for (int e = 0; e < n; ++e) fit += Amat[r * n + e] * x[e];
      rss += std::norm(fit - bvec[r]);
      tss += std::norm(bvec[r]);
    }
    return std::sqrt(rss / tss);
  };
  const std::string plant_kind = ctx.cfg.value("plant", "structure");
  if (plant_kind == "levi-civita")
    target = plant_levi_civita(small, sb);
  else if (plant_kind == "generic")
    target = generic;
  else
    require(plant_kind == "structure", ErrorKind::Config,
            "plant must be structure|levi-civita|generic");
  rep.set_param("plant", plant_kind);
  const int dict_size = ctx.integer("dictionary_size", 192);
  const double r_small = residual_for(target, 16);
  const double r_mid = residual_for(target, std::max(24, dict_size * 3 / 8));
  const double r_big = residual_for(target, std::max(32, dict_size));
  // Generic targets decay visibly slower; their gate is advisory-loose.
  const double ratio_bound = plant_kind == "generic" ? 0.98 : 0.93;
  rep.add_metric(
      metric_le("density_evidence_residual_ratio", r_big / r_small, ratio_bound));
  rep.add_metric(metric_le("density_evidence_monotone",
                           (r_mid < r_small && r_big < r_mid) ? 0.0 : 1.0, 0.5));
  rep.set_param("density_evidence_r_small", r_small);
  rep.set_param("density_evidence_r_mid", r_mid);
  rep.set_param("density_evidence_r_big", r_big);
  rep.set_param("density_evidence_generic_r_small", residual_for(generic, 16));
  rep.set_param("density_evidence_generic_r_big", residual_for(generic, dict_size));

  emit_csv(rep, ctx, "density_recovered_bhat.csv",
           {"xi0", "xi1", "xi2", "b0_re", "b0_im", "b1_re", "b1_im", "b2_re", "b2_im"},
           rec_rows);
  return rep;
}

// --------------------------------------------------------------- lincal

ExperimentReport run_lincal(const Ctx& ctx) {
  Rng rng(ctx.seed);
  ExperimentReport rep("lincal", ctx.seed);
  const int res = ctx.integer("resolution", 49);
  const int pairs = ctx.integer("pairs", 24);
  const std::string verb = ctx.cfg.value("verb", "all");
  require(verb == "all" || verb == "plant" || verb == "decompose" || verb == "tartar",
          ErrorKind::Config, "verb must be all|plant|decompose|tartar");
  rep.set_param("verb", verb);

  Grid g = Grid::cube(3, 0.0, 1.0, res);

  if (verb == "all" || verb == "plant") {
    AnalyticObstruction ob = random_obstruction_plant(g, rng, true, 3);
    std::vector<HarmonicFn> dict;
    for (auto& f : harmonic_polynomials(3, 3))
      if (f.descriptor.find("degree=0") == std::string::npos)
        dict.push_back(std::move(f));
    {
      std::vector<double> xi{2.0, 1.0, 0.5};
      std::vector<double> nu{0.0, 0.447213595499957939, -0.894427190999915878};
      dict.push_back(calderon_wave(calderon_pair(xi, nu).zeta_plus));
    }
    double worst = 0.0;
    for (int t = 0; t < pairs; ++t) {
      const HarmonicFn& u1 =
          dict[rng.uniform_int(0, static_cast<int>(dict.size()) - 1)];
      const HarmonicFn& u2 =
          dict[rng.uniform_int(0, static_cast<int>(dict.size()) - 1)];
      const double scale = ob.C.max_abs() * sample_gradient(u1, g).max_abs() *
                           sample_gradient(u2, g).max_abs() * g.volume();
      worst = std::max(worst, std::abs(double_identity(ob.C, u1, u2)) / scale);
    }
    rep.add_metric(metric_le("sufficiency_identity_rel", worst,
                             ctx.num("sufficiency_tol", 1e-7)));
  }

  if (verb == "all" || verb == "decompose") {
    // Decompose round trip across a refinement ladder.
    std::vector<double> hs, verrs, berrs;
    std::vector<std::vector<double>> ladder_rows;
    for (int n : {25, 33, 49, 65}) {
      Grid gg = Grid::cube(3, 0.0, 1.0, n);
      Rng plant_rng(ctx.seed + 1);
      AnalyticObstruction plant = random_obstruction_plant(gg, plant_rng, true, 1);
      Decomposition dec = decompose(plant.C);
      // Quadrature-weighted L2 errors; the max norm is dominated by the
      // support edge where the bump derivatives peak and converges one
      // order slower.
      double vl2 = 0.0, bl2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        ScalarField diff = dec.v.comp(a);
        diff -= plant.pair.v.comp(a);
        vl2 += sq(norm_l2(diff));
      }
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) bl2 += sq(norm_l2(dec.B_residual.comp(j, k)));
      hs.push_back(gg.spacing(0));
      verrs.push_back(std::sqrt(vl2));
      berrs.push_back(std::sqrt(bl2));
      ladder_rows.push_back({gg.spacing(0), verrs.back(), berrs.back()});
    }
    rep.add_metric(metric_ge("decompose_v_slope", fit_slope(hs, verrs).slope, 1.7));
    rep.add_metric(metric_ge("decompose_B_slope", fit_slope(hs, berrs).slope, 1.7));

    // Non-obstruction plant keeps its residual.
    Grid gg = Grid::cube(3, 0.0, 1.0, 25);
    ScalarField s = sample_scalar(gg, box_bump(gg, 0.7));
    Tensor2Field C(gg);
    for (int j = 0; j < 3; ++j) C.comp(j, j) = s;
    Decomposition dec = decompose(C);
    rep.add_metric(metric_ge("non_obstruction_residual", dec.B_residual.max_abs(),
                             0.05));
    emit_csv(rep, ctx, "lincal_decompose_ladder.csv", {"h", "v_err", "B_residual"},
             ladder_rows);
  }

  if (verb == "all" || verb == "tartar") {
    AnalyticVector v = bump_vector(g, {0.8, -0.5, 0.3});
    std::vector<std::vector<double>> trows;
    ExperimentReport tr =
        tartar_linearization(v, g, {1e-2, 5e-3, 2.5e-3, 1.25e-3}, &trows);
    for (const auto& m : tr.metrics()) rep.add_metric(m);
    emit_csv(rep, ctx, "lincal_tartar_sweep.csv", {"t", "residual", "det_residual"},
             trows);
  }
  return rep;
}

// ------------------------------------------------------------------ qls

std::vector<double> eps_list_from(const Ctx& ctx) {
  if (ctx.cfg.contains("eps_list")) {
    std::vector<double> out;
    for (const auto& v : ctx.cfg["eps_list"]) out.push_back(v.get<double>());
    return out;
  }
  return {1e-2, 7.5e-3, 5e-3, 2.5e-3};
}

// Boundary data / probe functions come from descriptor strings in the
// config when present.
BoundaryData boundary_data_from(const Ctx& ctx) {
  return BoundaryData{
      parse_harmonic(ctx.cfg.value("f1", "kind=poly;dim=3;degree=2;index=1")),
      parse_harmonic(ctx.cfg.value("f2", "kind=poly;dim=3;degree=2;index=3"))};
}

ExperimentReport run_qls_forward(const Ctx& ctx) {
  ExperimentReport rep("qls-forward", ctx.seed);
  const int res = ctx.integer("resolution", 25);
  Grid g = Grid::cube(3, 0.0, 1.0, res);
  CoupledTensors A = planted_coupled_tensors(g, ctx.num("amplitude", 1.0));
  BoundaryData data = boundary_data_from(ctx);
  rep.set_param("f1", data.f1.descriptor);
  rep.set_param("f2", data.f2.descriptor);
  ScalarField v01 = sample(data.f1, g);
  const auto v1 = second_corrector(A, data);

  const auto epss = eps_list_from(ctx);
  std::vector<double> first, second;
  std::vector<std::vector<double>> rows;
  double ratio = 0.0;
  for (double eps : epss) {
    ForwardSolution sol = solve_forward(A, data, eps, 1e-13);
    ScalarField lin = v01;
    lin *= Cx{eps, 0};
    ScalarField d1 = sol.u1;
    d1 -= lin;
    const double e1 = norm_h1(d1);
    ScalarField quad = v1[0];
    quad *= Cx{eps * eps, 0};
    d1 -= quad;
    const double e2 = norm_h1(d1);
    first.push_back(e1);
    second.push_back(e2);
    ratio = std::max(ratio, sol.contraction_ratio);
    rows.push_back({eps, e1, e2, sol.contraction_ratio,
                    static_cast<double>(sol.residual_history.size())});
  }
  rep.add_metric(metric_abs("first_order_slope", fit_slope(epss, first).slope, 2.0, 0.1));
  rep.add_metric(
      metric_abs("second_order_slope", fit_slope(epss, second).slope, 3.0, 0.15));
  rep.add_metric(metric_le("contraction_ratio", ratio, 0.5));
  emit_csv(rep, ctx, "qls_forward_sweep.csv",
           {"eps", "err_linear", "err_with_corrector", "contraction_ratio", "iters"},
           rows);
  return rep;
}

ExperimentReport run_qls_dtn(const Ctx& ctx) {
  ExperimentReport rep("qls-dtn", ctx.seed);
  const int res = ctx.integer("resolution", 25);
  Grid g = Grid::cube(3, 0.0, 1.0, res);
  CoupledTensors A = planted_coupled_tensors(g, ctx.num("amplitude", 1.0));
  BoundaryData data = boundary_data_from(ctx);
  HarmonicFn w =
      parse_harmonic(ctx.cfg.value("w", "kind=poly;dim=3;degree=2;index=0"));
  rep.set_param("w", w.descriptor);
  const auto epss = eps_list_from(ctx);

  SecondLinearization lin = second_linearization(A, data, w, epss);
  const auto oracle = moment_oracle(A, data, w);
  double rel = 0.0;
  for (int J = 0; J < 2; ++J)
    rel = std::max(rel, std::abs(lin.c2[J] - oracle[J]) /
                            std::max(1e-6, std::abs(oracle[J])));
  rep.add_metric(metric_le("c2_vs_oracle_rel", rel, 1e-3));

  auto flux = dtn_pair(A, data, epss.front(), constant_fn(3, Cx{1, 0}));
  rep.add_metric(metric_le("flux_against_constant",
                           std::max(std::abs(flux[0]), std::abs(flux[1])), 1e-12));

  std::vector<std::vector<double>> rows;
  for (double eps : epss) {
    auto pairing = dtn_pair(A, data, eps, w);
    rows.push_back({eps, pairing[0].real(), pairing[0].imag(), pairing[1].real(),
                    pairing[1].imag()});
  }
  emit_csv(rep, ctx, "qls_dtn_sweep.csv",
           {"eps", "pair1_re", "pair1_im", "pair2_re", "pair2_im"}, rows);
  return rep;
}

ExperimentReport run_qls_unique(const Ctx& ctx) {
  ExperimentReport rep("qls-unique", ctx.seed);
  const int res = ctx.integer("resolution", 25);
  Grid g = Grid::cube(3, 0.0, 1.0, res);
  CoupledTensors A = planted_coupled_tensors(g, ctx.num("amplitude", 1.0));

  std::vector<std::array<HarmonicFn, 3>> dict;
  dict.push_back({coordinate_fn(3, 0), coordinate_fn(3, 1), coordinate_fn(3, 2)});
  dict.push_back({coordinate_fn(3, 1), coordinate_fn(3, 0), coordinate_fn(3, 0)});
  dict.push_back({coordinate_fn(3, 2),
                  parse_harmonic("kind=poly;dim=3;degree=2;index=0"),
                  coordinate_fn(3, 1)});
  const int extra = ctx.integer("dictionary_extra", 0);
  Rng rng(ctx.seed);
  auto polys = harmonic_polynomials(2, 3);
  for (int t = 0; t < extra; ++t) {
    dict.push_back({polys[rng.uniform_int(0, static_cast<int>(polys.size()) - 1)],
                    polys[rng.uniform_int(0, static_cast<int>(polys.size()) - 1)],
                    polys[rng.uniform_int(0, static_cast<int>(polys.size()) - 1)]});
  }
  const auto epss = eps_list_from(ctx);

  UniquenessResult same = uniqueness_experiment(A, A, dict, epss);
  rep.add_metric(metric_le("identical_gap", same.max_gap,
                           std::max(same.fit_noise, 1e-12)));
  rep.set_param("fit_noise_identical", same.fit_noise);

  CoupledTensors tilde = planted_coupled_tensors(g, ctx.num("amplitude", 1.0));
  AnalyticScalar bump = box_bump(g, 0.55);
  const std::string pert = ctx.cfg.value("perturbation", "levi-civita");
  if (pert == "symmetric") {
    // Symmetric-in-last-two perturbation on the (1,1) block, seen by the
    // polarized (w, v, v) triples.
    Tensor3Field sym(g);
    sym.comp(1, 0, 0) += sample_scalar(g, bump);
    tilde.at(1, 1) = add(tilde.at(1, 1), sym);
  } else {
    require(pert == "levi-civita", ErrorKind::Config,
            "perturbation must be levi-civita|symmetric");
    tilde.at(1, 2) = add(tilde.at(1, 2), plant_levi_civita(g, bump));
  }
  rep.set_param("perturbation", pert);
  UniquenessResult sep = uniqueness_experiment(A, tilde, dict, epss);
  rep.add_metric(metric_ge("perturbed_gap_over_noise",
                           sep.max_gap / std::max(sep.fit_noise, 1e-300), 10.0));
  rep.set_param("coverage_warning", same.coverage_warning ? "true" : "false");

  emit_csv(rep, ctx, "qls_unique_gaps.csv", {"triple", "gap", "gap_J1", "gap_J2"},
           sep.rows);
  return rep;
}

using Runner = std::function<ExperimentReport(const Ctx&)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> reg = {
      {"quasimode-residual", run_quasimode_residual},
      {"stationary-phase", run_stationary_phase},
      {"density-check", run_density_check},
      {"lincal", run_lincal},
      {"qls-forward", run_qls_forward},
      {"qls-dtn", run_qls_dtn},
      {"qls-unique", run_qls_unique},
  };
  return reg;
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

ExperimentReport run_experiment_json(const std::string& config_json,
                                     const std::string& out_dir) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
  require(cfg.contains("experiment"), ErrorKind::Config,
          "config must name an experiment");
  require(cfg.contains("seed"), ErrorKind::Config, "config must carry a seed");
  const std::string name = cfg["experiment"].get<std::string>();
  const auto it = registry().find(name);
  require(it != registry().end(), ErrorKind::Config, "unknown experiment: " + name);

  std::filesystem::create_directories(out_dir);
  Ctx ctx{cfg, out_dir, cfg["seed"].get<std::uint64_t>()};
  ExperimentReport rep = it->second(ctx);

  // Rebuild with the canonical name/seed and persist.
  ExperimentReport out(name, ctx.seed);
  for (const auto& [k, v] : rep.params()) out.set_param(k, v);
  for (const auto& m : rep.metrics()) out.add_metric(m);
  for (const auto& a : rep.artifacts()) out.add_artifact(a);
  require(!out.metrics().empty(), ErrorKind::Config,
          "every experiment registers at least one metric");

  const std::string path =
      (std::filesystem::path(out_dir) / (name + "_report.json")).string();
  std::ofstream f(path);
  require(f.good(), ErrorKind::Io, "cannot write " + path);
  f << out.to_json(timestamp_now()) << "\n";
  return out;
}

ExperimentReport run_config_file(const std::string& config_path,
                                 const std::string& out_dir) {
  std::ifstream in(config_path);
  require(in.good(), ErrorKind::Io, "cannot open config " + config_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return run_experiment_json(text, out_dir);
}

bool report_json_valid(const std::string& report_json) {
  json j;
  try {
    j = json::parse(report_json);
  } catch (...) {
    return false;
  }
  for (const char* key : {"experiment", "seed", "params", "metrics", "artifacts"})
    if (!j.contains(key)) return false;
  if (!j["metrics"].is_array() || j["metrics"].empty()) return false;
  for (const auto& m : j["metrics"])
    for (const char* key : {"name", "value", "tol", "pass"})
      if (!m.contains(key)) return false;
  return true;
}

}  // namespace hqm
