#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>

#include <fmt/format.h>

#include "phmp/chain_recurrence.hpp"
#include "phmp/cocycle.hpp"
#include "phmp/ejection.hpp"
#include "phmp/error.hpp"
#include "phmp/hyperbolicity.hpp"
#include "phmp/markov.hpp"
#include "phmp/models.hpp"
#include "phmp/parallel.hpp"
#include "phmp/scenarios.hpp"
#include "phmp/surgery.hpp"
#include "phmp/svg.hpp"

namespace phmp {

namespace {

using json = nlohmann::json;

// collects verdicts, timings and plot files for one scenario
struct Run {
  const ScenarioContext& ctx;
  Report rep;
  std::map<std::string, std::string> files;

  template <class T>
  T opt(const char* key, T fallback) const {
    return ctx.config.contains(key) ? ctx.config.at(key).get<T>() : fallback;
  }

  template <class F>
  auto timed(const std::string& what, F&& body) {
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] { rep.timings[what] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      finish();
    } else {
      auto r = body();
      finish();
      return r;
    }
  }

  void verdict(std::string name, Status s, json scale, json detail) {
    rep.add({std::move(name), s, std::move(scale), std::move(detail)});
  }
};

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json mat(const Mat2& m) { return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})}); }

const Box3 kHorseshoeCore{{-1, -1, 0}, {1, 1, 1}};

Curve2 circle(double cx, double cy, double r, int n = 64) {
  Curve2 c;
  for (int k = 0; k <= n; ++k) {
    double t = 2 * kPi * k / n;
    c.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
  }
  return c;
}

// ---------------------------------------------------------------- markov

void solenoid_mixing(Run& run) {
  auto f = make_model("solenoid");
  auto mp = solenoid_partition();
  int N = run.opt("resolution", 64);
  RasterOptions ro;
  ro.resolution = N;
  auto rep = run.timed("verify", [&] { return verify_partition(*f, mp, ro); });
  run.verdict("partition-verified", status_of(rep.pass, rep.inconclusive), {{"resolution", N}, {"margin", rep.margin}},
              to_json(rep));
  const std::vector<std::vector<int>> expected{{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}};
  run.verdict("incidence-matrix", status_of(rep.incidence == expected, rep.inconclusive), {{"resolution", N}},
              {{"incidence", rep.incidence}, {"expected", expected}});
  auto mix = is_mixing(rep.incidence, 8);
  run.verdict("mixing-exponent", status_of(mix.verdict && mix.exponent == 2), {{"n_max", 8}},
              {{"mixing", mix.verdict}, {"exponent", mix.exponent}});
  IncidenceMatrix im{{}, rep.incidence, rep.inconclusive};
  for (const auto& r : mp.rectangles) im.labels.push_back(r.label);
  run.files["incidence.csv"] = incidence_csv(im);
  run.files["partition.json"] = to_json(mp).dump(2) + "\n";
}

void horseshoe_partition_check(Run& run) {
  auto f = make_model("horseshoe3d");
  auto mp = horseshoe_partition();
  int N = run.opt("resolution", 64);
  RasterOptions ro;
  ro.resolution = N;
  auto rep = run.timed("verify", [&] { return verify_partition(*f, mp, ro); });
  run.verdict("partition-verified", status_of(rep.pass, rep.inconclusive), {{"resolution", N}, {"margin", rep.margin}},
              to_json(rep));
  bool two = rep.incidence == std::vector<std::vector<int>>{{2}};
  run.verdict("two-vertical-strips", status_of(two, rep.inconclusive), {{"resolution", N}}, {{"incidence", rep.incidence}});
}

void refinement(Run& run) {
  auto f = make_model("solenoid");
  auto mp = solenoid_partition();
  int N = run.opt("resolution", 64);
  auto fine = run.timed("refine", [&] { return refine(*f, mp, 0, 1, N); });
  auto rep = run.timed("verify", [&] {
    RasterOptions ro;
    ro.resolution = N;
    return verify_partition(*f, fine, ro);
  });
  // edge graph of the 4-piece matrix: piece (a -> b) is followed by every (b -> c)
  const auto coarse = std::vector<std::vector<int>>{{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}};
  bool matches = fine.size() == 8;
  std::vector<std::pair<int, int>> edges;
  for (const auto& r : fine.rectangles) {
    if (r.itinerary.size() != 2) matches = false;
    else edges.push_back({r.itinerary[1], r.itinerary[0]});  // (f^-1 piece, current piece)
  }
  if (matches) {
    for (std::size_t a = 0; a < edges.size(); ++a)
      for (std::size_t b = 0; b < edges.size(); ++b) {
        int want = edges[a].second == edges[b].first && coarse[edges[b].first][edges[b].second] ? 1 : 0;
        if (rep.incidence.size() != edges.size() || rep.incidence[a][b] != want) matches = false;
      }
  }
  run.verdict("refined-partition-verified", status_of(rep.pass, rep.inconclusive), {{"resolution", N}, {"m", 0}, {"n", 1}},
              to_json(rep));
  run.verdict("edge-graph-incidence", status_of(matches, rep.inconclusive), {{"resolution", N}},
              {{"pieces", fine.size()}, {"incidence", rep.incidence}});
  run.files["refined.json"] = to_json(fine).dump(2) + "\n";
}

void segment_growth(Run& run) {
  auto f = make_model("solenoid");
  auto mp = solenoid_partition();
  // theta is the vertical direction of the solenoid rectangles; span one quarter turn
  Polyline seg;
  for (int k = 0; k <= 8; ++k) seg.push_back({0.25 * k / 8, 0, 0});
  int n_max = run.opt("n_max", 6);
  auto g = run.timed("growth", [&] { return vertical_segment_growth(*f, mp, seg, n_max); });
  bool ok = g.n0 >= 0 && g.monotone;
  run.verdict("segment-crosses-every-rectangle", status_of(ok), {{"n_max", n_max}, {"aperture_deg", 45}},
              {{"n0", g.n0}, {"crossings", g.crossings}, {"monotone", g.monotone}, {"points", g.points}});
}

// ---------------------------------------------------------------- cones and volume

ConeCertificate solenoid_cones(Run& run, double aperture, double floor, int N) {
  auto f = make_model("solenoid");
  CertifyOptions o;
  o.expansion_floor = floor;
  return run.timed("solenoid-cones", [&] {
    return certify_unstable_cones(*f, full_set(make_grid(f->chart(), N)), named_cone_field("solenoid-theta-cone", aperture), o);
  });
}

void cone_certificates(Run& run) {
  int N = run.opt("resolution", 16);
  auto hs = make_model("horseshoe3d");
  BoxSet rh = full_set(make_grid(kHorseshoeCore, N));
  auto c1 = solenoid_cones(run, deg(30), 1.5, N);
  run.verdict("solenoid-theta-cone", status_of(c1.pass),
              {{"resolution", N}, {"aperture_deg", 30}, {"margin_deg", c1.margin * 180 / kPi}, {"floor", 1.5}}, to_json(c1));
  CertifyOptions o;
  o.expansion_floor = 2.0;
  auto c2 = run.timed("horseshoe-cones", [&] { return certify_unstable_cones(*hs, rh, named_cone_field("vertical-cone", deg(30)), o); });
  run.verdict("horseshoe-vertical-cone", status_of(c2.pass),
              {{"resolution", N}, {"aperture_deg", 30}, {"margin_deg", c2.margin * 180 / kPi}, {"floor", 2.0}}, to_json(c2));
  auto c3 = run.timed("horseshoe-wide", [&] { return certify_unstable_cones(*hs, rh, named_cone_field("vertical-cone", deg(80)), o); });
  // the wide cone must be rejected and the rejection must name a witness
  bool rejected = !c3.pass && norm(c3.witness) > 0;
  run.verdict("wide-cone-rejected", status_of(rejected),
              {{"resolution", N}, {"aperture_deg", 80}, {"margin_deg", c3.margin * 180 / kPi}, {"floor", 2.0}}, to_json(c3));
}

void volume_hyperbolicity(Run& run) {
  int N = run.opt("resolution", 16);
  double lambda_bar = run.opt("lambda_bar", 0.15);
  auto sol = make_model("solenoid");
  auto hs = make_model("horseshoe3d");
  auto scf = named_cone_field("solenoid-theta-cone", deg(30));
  auto hcf = named_cone_field("vertical-cone", deg(30));
  auto spf = named_plane_field("fiber-plane");
  auto hpf = named_plane_field("xy-plane");

  double d_sol = std::abs(normal_cocycle_step(*sol, spf, scf, {0.3, 0.1, -0.2}).det);
  double d_b0 = std::abs(normal_cocycle_step(*hs, hpf, hcf, {0.1, 0.2, 0.1}).det);
  double d_b2 = std::abs(normal_cocycle_step(*hs, hpf, hcf, {-0.1, 0.3, 0.9}).det);
  bool dets = std::abs(d_sol - 1.0 / 16) <= 1e-12 && std::abs(d_b0 - 1.0 / 16) <= 1e-12 && std::abs(d_b2 - 0.1) <= 1e-12;
  run.verdict("normal-cocycle-determinants", status_of(dets), {{"tolerance", 1e-12}},
              {{"solenoid", d_sol}, {"horseshoe_lower", d_b0}, {"horseshoe_upper", d_b2}});

  CertifyOptions o;
  o.expansion_floor = 1.5;
  auto cs = run.timed("cones", [&] { return certify_unstable_cones(*sol, full_set(make_grid(sol->chart(), N)), scf, o); });
  auto ch = run.timed("cones", [&] { return certify_unstable_cones(*hs, full_set(make_grid(kHorseshoeCore, N)), hcf, o); });
  VolumeOptions vo;
  vo.lambda_bar = lambda_bar;
  vo.seed = run.ctx.seed;
  auto vs = run.timed("volume", [&] {
    return certify_volume_hyperbolic(*sol, full_set(make_grid(sol->chart(), N)), spf, scf, cs, vo);
  });
  auto vh = run.timed("volume", [&] {
    return certify_volume_hyperbolic(*hs, full_set(make_grid(kHorseshoeCore, N)), hpf, hcf, ch, vo);
  });
  json scale{{"resolution", N}, {"lambda_bar", lambda_bar}, {"orbits", vo.orbits}, {"orbit_len", vo.orbit_len}, {"seed", vo.seed}};
  run.verdict("solenoid-volume-hyperbolic", status_of(vs.pass), scale, to_json(vs));
  run.verdict("horseshoe-volume-hyperbolic", status_of(vh.pass), scale, to_json(vh));

  int trials = run.opt("trials", 1000);
  double err = run.timed("composition", [&] { return composition_identity_error(run.ctx.seed, trials); });
  run.verdict("composition-identity", status_of(err <= 1e-10), {{"trials", trials}, {"tolerance", 1e-10}, {"seed", run.ctx.seed}},
              {{"max_error", err}});
}

// ---------------------------------------------------------------- surgery kernel

void gamma_hat_kernel(Run& run) {
  double inner = run.opt("inner_deg", 20.0), outer = run.opt("outer_deg", 40.0), eta = run.opt("eta", 0.1);
  auto fam = ModificationFamily::rotation();
  auto tuned = run.timed("tune", [&] {
    return tune_gamma_hat(circular_cone({0, 0, 1}, deg(inner)), circular_cone({0, 0, 1}, deg(outer)), eta, fam);
  });
  const GammaHat& g = *tuned.kernel;
  const auto& cert = tuned.certificate;

  auto chk = g.chi().verify(10000);
  run.verdict("chi-properties", status_of(chk.ok()), {{"grid", 10000}, {"K", g.K()}, {"delta", g.delta()}, {"alpha", g.alpha()}},
              {{"linear_core", chk.linear_core},
               {"derivative_bounds", chk.derivative_bounds},
               {"identity_ends", chk.identity_ends},
               {"deviation", chk.deviation},
               {"max_deviation", chk.max_deviation},
               {"min_derivative", chk.min_derivative},
               {"max_derivative", chk.max_derivative}});

  // stratified samples: each region gets its own box, points near region walls or chi kinks skipped
  std::mt19937_64 rng(run.ctx.seed);
  std::uniform_real_distribution<double> u(-1, 1);
  const double s = g.alpha() / 2, h = 1e-6 * s;
  double block_err = 0, fd_err = 0;
  std::array<int, 3> counts{};
  int per_region = run.opt("samples", 2000);
  for (int reg = 1; reg <= 3; ++reg) {
    for (int k = 0; k < per_region; ++k) {
      Vec3 p;
      if (reg == 1) p = {s * u(rng) / 1.5, s * u(rng) / 1.5, s * u(rng)};
      else if (reg == 2) p = {s * u(rng) / 1.5, s * u(rng) / 1.5, (s + (1 - s) * (0.5 + 0.5 * u(rng))) * (u(rng) < 0 ? -1 : 1)};
      else p = {u(rng), u(rng), u(rng)};
      if (g.region(p) != reg) continue;
      double r = std::hypot(p.x, p.y);
      if (std::abs(r - s) < 100 * h || std::abs(std::abs(p.z) - s) < 100 * h || !g.smooth_near(p, 100 * h)) continue;
      if (std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)}) > 1 - 100 * h) continue;
      ++counts[reg - 1];
      Mat3 j = g.jacobian(p);
      block_err = std::max(block_err, max_abs_entry(j - g.block_jacobian(p)));
      Mat3 fd;
      for (int c = 0; c < 3; ++c) {
        Vec3 e{0, 0, 0};
        (c == 0 ? e.x : c == 1 ? e.y : e.z) = h;
        Vec3 d = (g.apply(p + e) - g.apply(p - e)) / (2 * h);
        fd(0, c) = d.x;
        fd(1, c) = d.y;
        fd(2, c) = d.z;
      }
      fd_err = std::max(fd_err, max_abs_entry(j - fd) / std::max(1.0, max_abs_entry(j)));
    }
  }
  run.verdict("block-jacobians", status_of(block_err <= 1e-9), {{"tolerance", 1e-9}, {"seed", run.ctx.seed}},
              {{"max_error", block_err}, {"samples_per_region", counts}});
  run.verdict("finite-difference-jacobian", status_of(fd_err <= 1e-5), {{"tolerance", 1e-5}, {"step", h}},
              {{"max_rel_error", fd_err}, {"samples_per_region", counts}});

  double min_exp = 1e300, min_slack = 1e300;
  json regions = json::array();
  for (const auto& r : cert.regions) {
    min_exp = std::min(min_exp, r.min_expansion);
    min_slack = std::min(min_slack, r.min_slack);
    regions.push_back({{"region", r.region}, {"samples", r.samples}, {"min_slack", r.min_slack},
                       {"min_expansion", r.min_expansion}, {"max_area_defect", r.max_area_defect}});
  }
  bool tuned_ok = cert.pass && min_exp > 0.9 && min_slack > 0;
  run.verdict("tuned-kernel", status_of(tuned_ok), {{"inner_deg", inner}, {"outer_deg", outer}, {"eta", eta}},
              {{"K", cert.K}, {"delta", cert.delta}, {"alpha", cert.alpha}, {"attempts", cert.attempts},
               {"regions", regions}, {"min_expansion", min_exp}, {"min_slack", min_slack},
               {"c_norm", cert.max_c_norm}, {"c_bound", cert.c_bound}});
}

void hamiltonian_families(Run& run) {
  std::mt19937_64 rng(run.ctx.seed);
  std::uniform_real_distribution<double> u(-1, 1);
  int samples = run.opt("samples", 500);
  auto rot = ModificationFamily::rotation();
  auto shear = ModificationFamily::shear(2);

  double norm_err = 0;
  for (int k = 0; k < samples; ++k) {
    std::array<double, 2> p{u(rng), u(rng)};
    if (std::hypot(p[0], p[1]) >= 1) continue;
    for (double t : {0.25, 0.5, 1.0}) {
      auto q = hamiltonian_flow(rot, t, p).point;
      norm_err = std::max(norm_err, std::abs(std::hypot(q[0], q[1]) - std::hypot(p[0], p[1])));
    }
  }
  run.verdict("rotation-preserves-norms", status_of(norm_err <= 1e-6), {{"tolerance", 1e-6}, {"samples", samples}},
              {{"max_error", norm_err}});

  Mat2 jr = hamiltonian_flow(rot, 1, {0, 0}).jacobian;
  // the field (dXi/dy, -dXi/dx) turns clockwise, so either orientation counts as a quarter turn
  double ccw = max_abs_entry(jr - Mat2::rotation(kPi / 2)), cw = max_abs_entry(jr - Mat2::rotation(-kPi / 2));
  double rot_err = std::min(ccw, cw);
  run.verdict("rotation-quarter-turn", status_of(rot_err <= 1e-6), {{"tolerance", 1e-6}},
              {{"jacobian", mat(jr)}, {"error", rot_err}, {"orientation", cw < ccw ? "clockwise" : "counterclockwise"}});

  Mat2 js = hamiltonian_flow(shear, 1, {0, 0}).jacobian;
  double sh_err = max_abs_entry(js - Mat2::diag(0.5, 2));
  run.verdict("shear-diagonal", status_of(sh_err <= 1e-6), {{"tolerance", 1e-6}, {"beta", 2}}, {{"jacobian", mat(js)}, {"error", sh_err}});

  // area preservation from finite differences of the time-1 map
  const double h = 1e-5;
  json area;
  bool area_ok = true;
  for (const auto& fam : {rot, shear}) {
    double worst = 0;
    std::mt19937_64 r2(run.ctx.seed + 1);
    for (int k = 0; k < samples; ++k) {
      std::array<double, 2> p{0.9 * u(r2), 0.9 * u(r2)};
      auto fx = [&](double dx, double dy) { return hamiltonian_flow(fam, 1, {p[0] + dx, p[1] + dy}).point; };
      auto a = fx(h, 0), b = fx(-h, 0), c = fx(0, h), d = fx(0, -h);
      Mat2 j{{(a[0] - b[0]) / (2 * h), (c[0] - d[0]) / (2 * h), (a[1] - b[1]) / (2 * h), (c[1] - d[1]) / (2 * h)}};
      worst = std::max(worst, std::abs(j.det() - 1));
    }
    area[fam.label()] = worst;
    area_ok = area_ok && worst < 1e-6;
  }
  run.verdict("area-preserving", status_of(area_ok), {{"tolerance", 1e-6}, {"fd_step", h}, {"samples", samples}},
              {{"max_area_defect", area}});
}

// ---------------------------------------------------------------- surgery outcomes

Mat3 period_jacobian(const ChartedMap& f, const MarkedPoint& m) {
  Mat3 j = Mat3::identity();
  Vec3 x = m.position;
  for (int k = 0; k < m.period; ++k) {
    j = f.jacobian(x) * j;
    x = f.wrap(f.forward(x));
  }
  return j;
}

Mat2 xy_block(const Mat3& j) { return {{j(0, 0), j(0, 1), j(1, 0), j(1, 1)}}; }
double coupling(const Mat3& j) { return std::max({std::abs(j(0, 2)), std::abs(j(1, 2)), std::abs(j(2, 0)), std::abs(j(2, 1))}); }

void complex_eigenvalues(Run& run) {
  auto hs = make_model("horseshoe3d");
  SurgerySpec spec;
  spec.target = "p";
  spec.scale = run.opt("scale", 0.05);
  spec.family = ModificationFamily::rotation();
  auto g = run.timed("surgery", [&] { return apply_surgery(hs, spec); });
  Mat3 j = period_jacobian(*g, g->marked_point("p"));
  auto e = eigenvalues2(xy_block(j));
  double m1 = std::abs(e.first), m2 = std::abs(e.second);
  bool ok = e.non_real && std::abs(m1 - 0.25) <= 1e-9 && std::abs(m2 - 0.25) <= 1e-9 && coupling(j) <= 1e-12;
  run.verdict("non-real-stable-eigenvalues", status_of(ok), {{"scale", spec.scale}, {"tolerance", 1e-9}},
              {{"re", e.first.real()}, {"im", e.first.imag()}, {"modulus", {m1, m2}}, {"coupling", coupling(j)}});

  int N = run.opt("resolution", 16);
  BoxSet rh = full_set(make_grid(kHorseshoeCore, N));
  auto cf = named_cone_field("vertical-cone", spec.outer_aperture);
  CertifyOptions o;
  o.expansion_floor = 1.5;
  auto c = run.timed("cones", [&] { return certify_unstable_cones(*g, rh, cf, o); });
  run.verdict("post-surgery-cones", status_of(c.pass),
              {{"resolution", N}, {"aperture_deg", spec.outer_aperture * 180 / kPi}, {"floor", 1.5},
               {"margin_deg", c.margin * 180 / kPi}},
              to_json(c));
  VolumeOptions vo;
  vo.lambda_bar = run.opt("lambda_bar", 0.2);
  vo.seed = run.ctx.seed;
  auto v = run.timed("volume", [&] { return certify_volume_hyperbolic(*g, rh, named_plane_field("xy-plane"), cf, c, vo); });
  run.verdict("post-surgery-volume", status_of(v.pass), {{"resolution", N}, {"lambda_bar", vo.lambda_bar}, {"seed", vo.seed}},
              to_json(v));
}

void index_change(Run& run) {
  auto hs = make_model("horseshoe3d");
  SurgerySpec spec;
  spec.target = "q2";
  spec.scale = run.opt("scale", 0.05);
  spec.family = ModificationFamily::shear(3);
  auto g = run.timed("surgery", [&] { return apply_surgery(hs, spec); });
  MarkedPoint q = g->marked_point("q2");
  Mat3 j = period_jacobian(*g, q);
  auto e = eigenvalues2(xy_block(j));
  double lo = std::min(e.first.real(), e.second.real()), hi = std::max(e.first.real(), e.second.real());
  bool ok = !e.non_real && std::abs(lo - 1.0 / 15) <= 1e-9 && std::abs(hi - 1.5) <= 1e-9 && q.stable_dim == 1;
  run.verdict("stable-index-one", status_of(ok), {{"scale", spec.scale}, {"beta", 3}, {"tolerance", 1e-9}},
              {{"eigenvalues", {lo, hi}}, {"stable_dim", q.stable_dim}, {"coupling", coupling(j)}});
  double tilt = std::max(std::abs(j(1, 0)), std::abs(j(2, 0)));
  run.verdict("x-axis-preserved", status_of(tilt <= 1e-9), {{"tolerance", 1e-9}}, {{"off_axis", tilt}, {"jx", vec(j.column(0))}});
}

// ---------------------------------------------------------------- flexibility

void flex_reference_path(Run& run) {
  auto p = reference_flex_path();
  auto at = [&](double eps) { return verify_flexible(p, eps); };
  auto r4 = at(0.4), r3 = at(0.3);
  json j4, j3;
  to_json(j4, r4);
  to_json(j3, r3);
  run.verdict("flexible-at-0.4", status_of(r4.flexible), {{"epsilon", 0.4}}, j4);
  bool only_diam = !r3.flexible && r3.failures.size() == 1 && r3.failures[0].condition == FlexCondition::diameter;
  run.verdict("not-flexible-at-0.3", status_of(only_diam), {{"epsilon", 0.3}}, j3);

  // one broken path per condition; each must fail exactly that condition
  auto node = [](double t, double a, double b) { return FlexNode{t, {{Mat2::diag(a, b)}}}; };
  auto base = PeriodicCocycle2{{Mat2::diag(0.5, 0.8)}};
  struct Case {
    FlexCondition c;
    FlexPath path;
    double eps;
  };
  std::vector<Case> cases{
      {FlexCondition::diameter, p, 0.3},
      {FlexCondition::base, make_flex_path({node(-1, .65, .65), node(0, .5, .8), node(1, .5, 1)}, PeriodicCocycle2{{Mat2::diag(.5, .79)}}), 0.4},
      {FlexCondition::homothety, make_flex_path({node(-1, .6, .65), node(0, .5, .8), node(1, .5, 1)}, base), 0.4},
      {FlexCondition::distinct_contracting, make_flex_path({node(-1, .7, .7), node(0, .7, .7), node(1, .7, 1)}, PeriodicCocycle2{{Mat2::diag(.7, .7)}}), 0.4},
      {FlexCondition::max_small_eigenvalue, make_flex_path({node(-1, .75, .75), node(0, .7, .8), node(1, 1, 1)}, PeriodicCocycle2{{Mat2::diag(.7, .8)}}), 0.4},
      {FlexCondition::eigenvalue_one, make_flex_path({node(-1, .65, .65), node(0, .5, .8), node(1, .5, .95)}, base), 0.4},
  };
  json toggles = json::object();
  bool all = true;
  for (const auto& c : cases) {
    auto r = verify_flexible(c.path, c.eps);
    bool isolated = !r.flexible && std::all_of(r.failures.begin(), r.failures.end(), [&](const FlexFailure& f) { return f.condition == c.c; });
    all = all && isolated;
    json names = json::array();
    for (const auto& f : r.failures) names.push_back(to_string(f.condition));
    toggles[to_string(c.c)] = {{"isolated", isolated}, {"failures", names}};
  }
  run.verdict("conditions-toggle", status_of(all), {{"cases", cases.size()}}, toggles);
  json pj;
  to_json(pj, p);
  run.files["path.json"] = pj.dump(2) + "\n";
}

// ---------------------------------------------------------------- chain recurrence

void contraction_refinement(Run& run) {
  auto f = make_model("contraction");
  json diam = json::array();
  std::vector<double> d;
  for (int N : {16, 32, 64}) {
    double v = run.timed(fmt::format("graph-{}", N), [&] {
      auto g = build_box_graph(*f, full_set(make_grid(f->chart(), N)), 0);
      auto md = morse_decomposition(g);
      return set_diameter(chain_recurrent_set(g, md));
    });
    d.push_back(v);
    diam.push_back({{"resolution", N}, {"diameter", v}});
  }
  bool shrinks = d[0] >= 1.5 * d[1] && d[1] >= 1.5 * d[2];
  run.verdict("chain-recurrent-set-shrinks", status_of(shrinks), {{"resolutions", {16, 32, 64}}, {"epsilon", 0}, {"factor", 1.5}},
              {{"diameters", diam}});

  // true orbit steps must follow graph edges
  int N = run.opt("soundness_resolution", 32);
  int steps = run.opt("orbit_steps", 10000);
  auto g = build_box_graph(*f, full_set(make_grid(f->chart(), N)), 0);
  std::mt19937_64 rng(run.ctx.seed);
  std::uniform_real_distribution<double> u(-1, 1);
  int tested = 0, bad = 0;
  json witness;
  Vec3 x{u(rng), u(rng), u(rng)};
  for (int k = 0; k < steps; ++k) {
    if (k % 20 == 0) x = {u(rng), u(rng), u(rng)};  // fresh orbit every 20 steps
    Vec3 y = f->forward(x);
    auto a = g.grid.locate(x), b = g.grid.locate(y);
    if (a && b) {
      ++tested;
      if (!g.has_edge(g.node_of[*a], g.node_of[*b])) {
        if (!bad) witness = {{"x", vec(x)}, {"fx", vec(y)}};
        ++bad;
      }
    }
    x = y;
  }
  run.verdict("edges-sound", status_of(bad == 0 && tested == steps), {{"resolution", N}, {"orbit_steps", steps}, {"seed", run.ctx.seed}},
              {{"tested", tested}, {"unsound", bad}, {"witness", witness}});
}

void unique_quasi_attractor(Run& run) {
  auto f = make_model("solenoid");
  for (int N : {32, 64}) {
    auto [count, cov, attractor] = run.timed(fmt::format("graph-{}", N), [&] {
      auto g = build_box_graph(*f, full_set(make_grid(f->chart(), N)), 0);
      auto md = morse_decomposition(g);
      auto q = quasi_attractor_candidates(g, md);
      double c = q.size() == 1 ? basin_coverage(g, class_set(g, md, q[0])) : 0.0;
      BoxSet a = q.size() == 1 ? class_set(g, md, q[0]) : BoxSet{g.grid, {}};
      return std::tuple{q.size(), c, a};
    });
    bool ok = count == 1 && cov == 1.0;
    run.verdict(fmt::format("unique-quasi-attractor-{}", N), status_of(ok), {{"resolution", N}, {"epsilon", 0}},
                {{"candidates", count}, {"basin_coverage", cov}, {"attractor_boxes", attractor.size()}});
    if (N == 64) {
      SlicePlot plot(f->chart().domain, {0, 0.0}, "solenoid attractor boxes");
      plot.add_boxes(attractor, "#1f77b4", "quasi-attractor");
      run.files["attractor-theta0.svg"] = plot.render();
    }
  }
}

// ---------------------------------------------------------------- ejection

void ejection(Run& run) {
  int N = run.opt("resolution", 64);
  double eps = run.opt("epsilon", 0.0);
  auto hs = make_model("horseshoe3d");
  auto mp = horseshoe_partition();
  SurgerySpec spec;
  spec.target = "q2";
  spec.scale = 0.05;
  spec.family = ModificationFamily::shear(3);
  auto g = run.timed("surgery", [&] { return apply_surgery(hs, spec); });
  std::vector<Curve2> curves{circle(0, 0.6, 0.15), circle(0, -0.6, 0.15)};
  if (run.ctx.config.contains("curves")) curves = run.ctx.config.at("curves").get<std::vector<Curve2>>();

  auto post = run.timed("post-surgery", [&] { return ejection_certificate(*g, mp, "q2", curves, eps, N); });
  json scale{{"resolution", N}, {"epsilon", eps}, {"clearance_cells", 2}};
  run.verdict("obstacles-resolution-stable", status_of(!post.delta.inconclusive, post.delta.inconclusive), scale, to_json(post.delta));
  run.verdict("curves-clear-obstacles", status_of(post.curves_clear, post.inconclusive), scale, to_json(post)["curves"]);
  run.verdict("orbit-class-trivial", status_of(post.class_trivial, post.inconclusive), scale, to_json(post)["chain_class"]);

  auto pre = run.timed("control", [&] { return ejection_certificate(*hs, mp, "q2", curves, eps, N); });
  run.verdict("control-class-not-trivial", status_of(!pre.class_trivial, pre.inconclusive), scale, to_json(pre)["chain_class"]);
  run.files["obstacles.svg"] = delta_d_svg(post.delta, curves);
}

struct Entry {
  const char* name;
  const char* description;
  void (*fn)(Run&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {"solenoid-mixing", "four-piece solenoid partition, incidence matrix and mixing exponent", solenoid_mixing},
      {"horseshoe-partition", "single-rectangle horseshoe partition with two vertical strips", horseshoe_partition_check},
      {"refinement", "two-step refinement of the solenoid partition against the edge graph", refinement},
      {"segment-growth", "vertical segment in the solenoid until it crosses every rectangle", segment_growth},
      {"cone-certificates", "unstable cones for solenoid and horseshoe, wide cone rejected", cone_certificates},
      {"volume-hyperbolicity", "normal cocycle determinants, volume certificates, composition identity", volume_hyperbolicity},
      {"gamma-hat-kernel", "chi properties, kernel jacobians and tuned kernel certificate", gamma_hat_kernel},
      {"hamiltonian-families", "rotation and shear modification families", hamiltonian_families},
      {"complex-eigenvalues", "rotation surgery at the horseshoe fixed point", complex_eigenvalues},
      {"index-change", "shear surgery at q2 drops the stable index to one", index_change},
      {"flex-reference-path", "reference path flexible at 0.4, not at 0.3, condition toggles", flex_reference_path},
      {"contraction-refinement", "chain recurrent set of the contraction under grid refinement", contraction_refinement},
      {"unique-quasi-attractor", "solenoid has one quasi-attractor candidate with full basin", unique_quasi_attractor},
      {"ejection", "obstacles, curves and orbit class after shear surgery, with pre-surgery control", ejection},
  };
  return r;
}

const Entry& lookup(const std::string& name) {
  for (const auto& e : registry())
    if (name == e.name) return e;
  throw Error(ErrorKind::usage, "unknown scenario '" + name + "'");
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.name);
  return out;
}

std::string scenario_description(const std::string& name) { return lookup(name).description; }

Report run_scenario(const std::string& name, const ScenarioContext& ctx) {
  const Entry& e = lookup(name);
  Run run{ctx, {}, {}};
  run.rep.command = "scenario " + name;
  run.rep.config = {{"scenario", name}, {"seed", ctx.seed}, {"overrides", ctx.config}};
  auto t0 = std::chrono::steady_clock::now();
  e.fn(run);
  run.rep.timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!ctx.out.empty()) {
    auto dir = std::filesystem::path(ctx.out) / name;
    write_report(run.rep, dir.string());
    for (const auto& [file, text] : run.files) write_text((dir / file).string(), text);
  }
  return run.rep;
}

std::vector<Report> run_scenarios(const std::vector<std::string>& names, const ScenarioContext& ctx, int jobs) {
  for (const auto& n : names) lookup(n);  // fail before doing any work
  std::vector<Report> out(names.size());
  auto one = [&](std::size_t i) {
    ScenarioContext c = ctx;
    c.config = ctx.config.value(names[i], json::object());
    out[i] = run_scenario(names[i], c);
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < names.size(); ++i) one(i);
    return out;
  }
  int saved = phmp::jobs();
  set_jobs(jobs);
  try {
    parallel_for(names.size(), one);
  } catch (...) {
    set_jobs(saved);
    throw;
  }
  set_jobs(saved);
  return out;
}

}  // namespace phmp
