// phmp command line front end
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "phmp/chain_recurrence.hpp"
#include "phmp/cocycle.hpp"
#include "phmp/ejection.hpp"
#include "phmp/error.hpp"
#include "phmp/hyperbolicity.hpp"
#include "phmp/markov.hpp"
#include "phmp/models.hpp"
#include "phmp/parallel.hpp"
#include "phmp/report.hpp"
#include "phmp/scenarios.hpp"
#include "phmp/surgery.hpp"
#include "phmp/svg.hpp"

using namespace phmp;
using json = nlohmann::json;

namespace {

struct Global {
  std::string config_path, out = "phmp-out";
  int jobs = 1;
  std::uint64_t seed = 0;
  json config = json::object();
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_spec, path + ": " + e.what());
  }
}

// command line wins; otherwise the config file value under `key`, otherwise the default
template <class T>
void from_config(const Global& g, CLI::Option* opt, const char* key, T& var) {
  if (opt->count() == 0 && g.config.contains(key)) var = g.config.at(key).get<T>();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
  return out;
}

Vec3 parse_vec(const std::string& s) {
  auto p = split(s, ',');
  if (p.size() != 3) throw Error(ErrorKind::usage, "expected x,y,z but got '" + s + "'");
  return {std::stod(p[0]), std::stod(p[1]), std::stod(p[2])};
}

Box3 parse_box(const std::string& s) {
  auto p = split(s, ';');
  if (p.size() != 2) throw Error(ErrorKind::usage, "expected lo;hi with lo = x,y,z");
  return {parse_vec(p[0]), parse_vec(p[1])};
}

SlicePlane parse_slice(const std::string& s) {
  auto p = split(s, '=');
  if (p.size() != 2 || p[0].size() != 1 || std::string("xyz").find(p[0][0]) == std::string::npos)
    throw Error(ErrorKind::usage, "slice must look like z=0.5");
  return {static_cast<int>(std::string("xyz").find(p[0][0])), std::stod(p[1])};
}

json jvec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

// model plus optional surgery; the partition belongs to the base model
struct Target {
  std::string model = "solenoid";
  std::string surgery_path;
  std::string partition_path;
  std::string region;

  MapPtr map;
  std::string base_name;
  json description;

  void add(CLI::App* c) {
    c->add_option("--model", model, "model name (see `phmp models`)");
    c->add_option("--surgery", surgery_path, "surgery spec JSON applied to the model");
    c->add_option("--partition", partition_path, "partition JSON (default: bundled partition of the model)");
    c->add_option("--region", region, "region box 'x,y,z;x,y,z' (default: model core)");
  }

  void load(const Global& g, CLI::App* c) {
    from_config(g, c->get_option("--model"), "model", model);
    from_config(g, c->get_option("--partition"), "partition", partition_path);
    from_config(g, c->get_option("--region"), "region", region);
    base_name = model;
    map = make_model(model);
    description = {{"model", model}};
    json spec;
    if (!surgery_path.empty()) spec = read_json(surgery_path);
    else if (g.config.contains("surgery")) spec = g.config.at("surgery");
    if (!spec.is_null()) {
      map = apply_surgery(map, surgery_spec_from_json(spec));
      description["surgery"] = spec;
    }
    if (!partition_path.empty()) description["partition"] = partition_path;
    if (!region.empty()) description["region"] = region;
  }

  MarkovPartition partition() const {
    return partition_path.empty() ? builtin_partition(base_name) : partition_from_json(read_json(partition_path));
  }

  Box3 region_box() const {
    if (!region.empty()) return parse_box(region);
    if (base_name == "horseshoe3d") return {{-1, -1, 0}, {1, 1, 1}};  // the escape band below z = 0 is not invariant
    return map->chart().domain;
  }
};

int finish(const Global& g, Report& rep, const std::map<std::string, std::string>& files = {}) {
  write_report(rep, g.out);
  for (const auto& [name, text] : files) write_text((std::filesystem::path(g.out) / name).string(), text);
  for (const auto& v : rep.verdicts) fmt::print("{:<13} {}\n", to_string(v.status), v.name);
  fmt::print("report: {}\n", (std::filesystem::path(g.out) / "report.json").string());
  return rep.exit_code();
}

Report start(const Global& g, const std::string& command, json config) {
  Report r;
  r.command = command;
  config["seed"] = g.seed;
  r.config = std::move(config);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partially hyperbolic Markov partitions: certificates and scenarios"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--config", g.config_path, "JSON file with defaults for the chosen command");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for sampled checks")->capture_default_str();

  std::function<int()> action;

  // ---- models
  auto* models = app.add_subcommand("models", "list models or check one against finite differences");
  std::string check_name;
  int check_samples = 2000;
  models->add_option("--check", check_name, "model to check");
  models->add_option("--samples", check_samples)->capture_default_str();
  models->callback([&] {
    action = [&] {
      if (check_name.empty()) {
        for (const auto& n : model_names()) {
          auto m = make_model(n);
          const auto& d = m->chart().domain;
          fmt::print("{:<18} chart {} [{},{}]x[{},{}]x[{},{}]\n", n, m->chart().name, d.lo.x, d.hi.x, d.lo.y, d.hi.y, d.lo.z, d.hi.z);
        }
        return 0;
      }
      auto m = make_model(check_name);
      auto c = check_charted_map(*m, check_samples, g.seed, 1e-5, m->sample_hints());
      Report rep = start(g, "models --check", {{"model", check_name}, {"samples", check_samples}});
      rep.add({"charted-map", status_of(c.pass), {{"samples", c.samples}, {"fd_step", 1e-5}},
               {{"skipped_nonsmooth", c.skipped_nonsmooth},
                {"max_inverse_error", c.max_inverse_error},
                {"max_jacobian_rel_error", c.max_jacobian_rel_error},
                {"max_lipschitz_ratio", c.max_lipschitz_ratio}}});
      return finish(g, rep);
    };
  });

  // ---- flex
  auto* flex = app.add_subcommand("flex", "verify flexibility of a periodic 2x2 cocycle path");
  std::string path_file, diagonal;
  double flex_eps = 0.4, flex_tol = 1e-9;
  flex->add_option("--path", path_file, "path JSON (default: reference path)");
  flex->add_option("--diagonal", diagonal, "build the diagonal path for 'a,b'");
  auto* eps_opt = flex->add_option("--epsilon", flex_eps)->capture_default_str();
  flex->add_option("--tol", flex_tol)->capture_default_str();
  flex->callback([&] {
    action = [&] {
      from_config(g, eps_opt, "epsilon", flex_eps);
      FlexPath p = reference_flex_path();
      std::string source = "reference";
      if (!path_file.empty()) {
        p = flex_path_from_json(read_json(path_file));
        source = path_file;
      } else if (!diagonal.empty()) {
        auto ab = split(diagonal, ',');
        if (ab.size() != 2) throw Error(ErrorKind::usage, "--diagonal expects a,b");
        p = build_diagonal_flex_path(std::stod(ab[0]), std::stod(ab[1]));
        source = "diagonal " + diagonal;
      }
      auto r = verify_flexible(p, flex_eps, flex_tol);
      json detail;
      to_json(detail, r);
      Report rep = start(g, "flex", {{"path", source}, {"epsilon", flex_eps}, {"tol", flex_tol}});
      rep.add({"flexible", status_of(r.flexible), {{"epsilon", flex_eps}, {"tol", flex_tol}}, detail});
      json pj;
      to_json(pj, p);
      return finish(g, rep, {{"path.json", pj.dump(2) + "\n"}});
    };
  });

  // ---- markov
  auto* markov = app.add_subcommand("markov", "Markov partition checks");
  markov->require_subcommand(1);
  Target mt;
  int mN = 64, m_lo = 0, m_hi = 1, n_max = 8;
  bool no_doubling = false;
  std::string segment;
  double seg_aperture = 45;
  auto markov_common = [&](CLI::App* c) {
    mt.add(c);
    c->add_option("-N,--resolution", mN)->capture_default_str();
    c->add_flag("--no-doubling", no_doubling, "skip the resolution-doubling stability pass");
  };
  auto* mverify = markov->add_subcommand("verify", "rasterised Markov conditions and filtration");
  auto* mincid = markov->add_subcommand("incidence", "incidence matrix, mixing and transitivity");
  auto* mrefine = markov->add_subcommand("refine", "pieces of the intersection of f^i(R), m <= i <= n");
  auto* mgrowth = markov->add_subcommand("growth", "iterate a vertical segment until it crosses every rectangle");
  for (auto* c : {mverify, mincid, mrefine, mgrowth}) markov_common(c);
  mincid->add_option("--n-max", n_max)->capture_default_str();
  mrefine->add_option("-m", m_lo)->capture_default_str();
  mrefine->add_option("-n", m_hi)->capture_default_str();
  mgrowth->add_option("--segment", segment, "polyline 'x,y,z;x,y,z;...' or a JSON file")->required();
  mgrowth->add_option("--n-max", n_max)->capture_default_str();
  mgrowth->add_option("--aperture", seg_aperture, "degrees")->capture_default_str();

  auto markov_run = [&](CLI::App* c, const std::string& verb) {
    mt.load(g, c);
    from_config(g, c->get_option("--resolution"), "resolution", mN);
    auto mp = mt.partition();
    json cfg = mt.description;
    cfg["resolution"] = mN;
    if (verb == "verify") {
      Report rep = start(g, "markov verify", cfg);
      RasterOptions ro;
      ro.resolution = mN;
      ro.check_doubling = !no_doubling;
      auto r = verify_partition(*mt.map, mp, ro);
      rep.add({"markov-partition", status_of(r.pass, r.inconclusive), {{"resolution", mN}, {"margin", r.margin}}, to_json(r)});
      return finish(g, rep);
    }
    if (verb == "incidence") {
      cfg["n_max"] = n_max;
      Report rep = start(g, "markov incidence", cfg);
      auto m = incidence_matrix(*mt.map, mp, mN, !no_doubling);
      auto mix = is_mixing(m.a, n_max);
      auto tr = is_transitive(m.a, n_max);
      rep.add({"mixing", status_of(mix.verdict, m.inconclusive), {{"resolution", mN}, {"n_max", n_max}},
               {{"exponent", mix.exponent}, {"incidence", to_json(m)}}});
      rep.add({"transitive", status_of(tr.verdict, m.inconclusive), {{"resolution", mN}, {"n_max", n_max}},
               {{"exponent", tr.exponent}}});
      return finish(g, rep, {{"incidence.csv", incidence_csv(m)}, {"incidence.json", to_json(m).dump(2) + "\n"}});
    }
    if (verb == "refine") {
      cfg["m"] = m_lo;
      cfg["n"] = m_hi;
      Report rep = start(g, "markov refine", cfg);
      auto fine = refine(*mt.map, mp, m_lo, m_hi, mN);
      rep.add({"refined", Status::pass, {{"resolution", mN}, {"m", m_lo}, {"n", m_hi}}, {{"pieces", fine.size()}}});
      return finish(g, rep, {{"refined.json", to_json(fine).dump(2) + "\n"}});
    }
    Polyline seg;
    if (std::filesystem::exists(segment)) {
      for (const auto& p : read_json(segment)) seg.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    } else {
      for (const auto& p : split(segment, ';')) seg.push_back(parse_vec(p));
    }
    cfg["segment"] = segment;
    cfg["n_max"] = n_max;
    cfg["aperture_deg"] = seg_aperture;
    Report rep = start(g, "markov growth", cfg);
    auto gr = vertical_segment_growth(*mt.map, mp, seg, n_max, deg(seg_aperture));
    rep.add({"segment-growth", status_of(gr.n0 >= 0), {{"n_max", n_max}, {"aperture_deg", seg_aperture}},
             {{"n0", gr.n0}, {"crossings", gr.crossings}, {"monotone", gr.monotone}, {"points", gr.points}}});
    return finish(g, rep);
  };
  mverify->callback([&] { action = [&] { return markov_run(mverify, "verify"); }; });
  mincid->callback([&] { action = [&] { return markov_run(mincid, "incidence"); }; });
  mrefine->callback([&] { action = [&] { return markov_run(mrefine, "refine"); }; });
  mgrowth->callback([&] { action = [&] { return markov_run(mgrowth, "growth"); }; });

  // ---- certify
  auto* certify = app.add_subcommand("certify", "cone, domination, volume and stable-manifold certificates");
  certify->require_subcommand(1);
  Target ct;
  int cN = 16, samples_per_box = 8, orbits = 256, orbit_len = 20;
  double aperture = 30, floor = 1.5, margin = 0.5, lambda_bar = 0.15;
  std::string field, plane, point;
  auto* ccones = certify->add_subcommand("cones", "strictly invariant expanded unstable cone field");
  auto* cdom = certify->add_subcommand("dominated", "strict cone invariance without expansion");
  auto* cvol = certify->add_subcommand("volume", "normal-bundle determinant bound along sampled orbits");
  auto* clsm = certify->add_subcommand("large-stable", "centre-stable disc inside the stable manifold");
  for (auto* c : {ccones, cdom, cvol, clsm}) {
    ct.add(c);
    c->add_option("-N,--resolution", cN)->capture_default_str();
    c->add_option("--field", field, "cone field name (default by model)");
    c->add_option("--aperture", aperture, "cone aperture in degrees")->capture_default_str();
    c->add_option("--floor", floor, "expansion floor")->capture_default_str();
    c->add_option("--margin", margin, "containment margin in degrees")->capture_default_str();
    c->add_option("--samples-per-box", samples_per_box)->capture_default_str();
  }
  cvol->add_option("--plane", plane, "plane field name (default by model)");
  cvol->add_option("--lambda-bar", lambda_bar)->capture_default_str();
  cvol->add_option("--orbits", orbits)->capture_default_str();
  cvol->add_option("--orbit-len", orbit_len)->capture_default_str();
  clsm->add_option("--point", point, "marked point")->required();

  auto certify_run = [&](CLI::App* c, const std::string& verb) {
    ct.load(g, c);
    from_config(g, c->get_option("--resolution"), "resolution", cN);
    from_config(g, c->get_option("--aperture"), "aperture_deg", aperture);
    from_config(g, c->get_option("--floor"), "floor", floor);
    from_config(g, c->get_option("--field"), "field", field);
    if (field.empty()) field = ct.base_name == "solenoid" ? "solenoid-theta-cone" : "vertical-cone";
    json cfg = ct.description;
    cfg.update({{"resolution", cN}, {"field", field}, {"aperture_deg", aperture}, {"floor", floor}, {"margin_deg", margin}});
    Report rep = start(g, "certify " + verb, cfg);
    if (verb == "large-stable") {
      auto v = check_large_stable_manifold(*ct.map, ct.partition(), point);
      rep.add({"large-stable-manifold", status_of(v.pass), {{"min_radius", 1e-7}, {"tol", 1e-6}}, to_json(v)});
      return finish(g, rep);
    }
    BoxSet region = full_set(make_grid(ct.region_box(), cN));
    auto cf = named_cone_field(field, deg(aperture));
    CertifyOptions o;
    o.expansion_floor = floor;
    o.margin = deg(margin);
    o.samples_per_box = samples_per_box;
    json scale{{"resolution", cN}, {"aperture_deg", aperture}, {"margin_deg", margin}, {"floor", floor}};
    if (verb == "dominated") {
      auto r = certify_dominated(*ct.map, region, cf, o);
      rep.add({"dominated", status_of(r.pass), scale, to_json(r)});
      return finish(g, rep);
    }
    auto u = certify_unstable_cones(*ct.map, region, cf, o);
    rep.add({"unstable-cones", status_of(u.pass), scale, to_json(u)});
    if (verb == "volume") {
      from_config(g, cvol->get_option("--plane"), "plane", plane);
      from_config(g, cvol->get_option("--lambda-bar"), "lambda_bar", lambda_bar);
      if (plane.empty()) plane = ct.base_name == "solenoid" ? "fiber-plane" : "xy-plane";
      VolumeOptions vo;
      vo.lambda_bar = lambda_bar;
      vo.orbits = orbits;
      vo.orbit_len = orbit_len;
      vo.seed = g.seed;
      json vs{{"lambda_bar", lambda_bar}, {"orbits", orbits}, {"orbit_len", orbit_len}, {"plane", plane}};
      if (!u.pass) {
        rep.add({"volume-hyperbolic", Status::fail, vs, {{"reason", "unstable cone certificate failed"}}});
      } else {
        auto v = certify_volume_hyperbolic(*ct.map, region, named_plane_field(plane), cf, u, vo);
        rep.add({"volume-hyperbolic", status_of(v.pass), vs, to_json(v)});
      }
    }
    return finish(g, rep);
  };
  ccones->callback([&] { action = [&] { return certify_run(ccones, "cones"); }; });
  cdom->callback([&] { action = [&] { return certify_run(cdom, "dominated"); }; });
  cvol->callback([&] { action = [&] { return certify_run(cvol, "volume"); }; });
  clsm->callback([&] { action = [&] { return certify_run(clsm, "large-stable"); }; });

  // ---- chainrec
  auto* chainrec = app.add_subcommand("chainrec", "box-graph chain recurrence");
  chainrec->require_subcommand(1);
  Target rt;
  int rN = 32;
  double epsilon = 0;
  std::string slice, curves_file, eject_point;
  auto* rgraph = chainrec->add_subcommand("graph", "box graph summary");
  auto* rclasses = chainrec->add_subcommand("classes", "Morse decomposition");
  auto* rquasi = chainrec->add_subcommand("quasi", "quasi-attractor candidates");
  auto* rbasin = chainrec->add_subcommand("basin", "basin coverage of the unique quasi-attractor candidate");
  auto* reject = chainrec->add_subcommand("eject", "obstacles, certificate curves and orbit chain class");
  for (auto* c : {rgraph, rclasses, rquasi, rbasin, reject}) {
    rt.add(c);
    c->add_option("-N,--resolution", rN)->capture_default_str();
    c->add_option("--epsilon", epsilon)->capture_default_str();
    c->add_option("--slice", slice, "write an SVG slice, e.g. x=0");
  }
  reject->add_option("--point", eject_point, "periodic marked point")->required();
  reject->add_option("--curves", curves_file, "JSON list of polylines [[x,y],...] in the disc plane")->required();

  auto chainrec_run = [&](CLI::App* c, const std::string& verb) {
    rt.load(g, c);
    from_config(g, c->get_option("--resolution"), "resolution", rN);
    from_config(g, c->get_option("--epsilon"), "epsilon", epsilon);
    json cfg = rt.description;
    cfg.update({{"resolution", rN}, {"epsilon", epsilon}});
    Report rep = start(g, "chainrec " + verb, cfg);
    json scale{{"resolution", rN}, {"epsilon", epsilon}};
    std::map<std::string, std::string> files;
    if (verb == "eject") {
      std::vector<Curve2> curves = read_json(curves_file).get<std::vector<Curve2>>();
      auto e = ejection_certificate(*rt.map, rt.partition(), eject_point, curves, epsilon, rN);
      auto j = to_json(e);
      rep.add({"obstacles-resolution-stable", status_of(!e.delta.inconclusive, e.delta.inconclusive), scale, j["delta"]});
      rep.add({"curves-clear-obstacles", status_of(e.curves_clear, e.inconclusive), scale, j["curves"]});
      rep.add({"orbit-class-trivial", status_of(e.class_trivial, e.inconclusive), scale, j["chain_class"]});
      files["obstacles.svg"] = delta_d_svg(e.delta, curves);
      return finish(g, rep, files);
    }
    BoxSet region = full_set(make_grid(rt.region_box(), rN));
    auto graph = build_box_graph(*rt.map, region, epsilon);
    auto md = morse_decomposition(graph);
    auto plot = [&](const BoxSet& s, const std::string& what) {
      if (slice.empty()) return;
      SlicePlot p(region.grid.box, parse_slice(slice), fmt::format("{} ({})", what, rt.model));
      p.add_boxes(s, "#1f77b4", what);
      files[what + ".svg"] = p.render();
    };
    if (verb == "graph" || verb == "classes") {
      auto summary = summary_json(graph, md);
      rep.add({verb == "graph" ? "box-graph" : "morse-decomposition", Status::pass, scale, summary});
      plot(chain_recurrent_set(graph, md), "chain-recurrent");
      return finish(g, rep, files);
    }
    auto q = quasi_attractor_candidates(graph, md);
    if (verb == "quasi") {
      json sizes = json::array();
      for (int k : q) sizes.push_back(md.classes[k].size());
      rep.add({"unique-quasi-attractor", status_of(q.size() == 1), scale, {{"candidates", q.size()}, {"boxes", sizes}}});
      if (!q.empty()) plot(class_set(graph, md, q[0]), "quasi-attractor");
      return finish(g, rep, files);
    }
    if (q.size() != 1) {
      rep.add({"basin-coverage", Status::fail, scale, {{"reason", fmt::format("{} quasi-attractor candidates", q.size())}}});
      return finish(g, rep, files);
    }
    double cov = basin_coverage(graph, class_set(graph, md, q[0]));
    rep.add({"basin-coverage", status_of(cov == 1.0), scale, {{"coverage", cov}}});
    return finish(g, rep, files);
  };
  rgraph->callback([&] { action = [&] { return chainrec_run(rgraph, "graph"); }; });
  rclasses->callback([&] { action = [&] { return chainrec_run(rclasses, "classes"); }; });
  rquasi->callback([&] { action = [&] { return chainrec_run(rquasi, "quasi"); }; });
  rbasin->callback([&] { action = [&] { return chainrec_run(rbasin, "basin"); }; });
  reject->callback([&] { action = [&] { return chainrec_run(reject, "eject"); }; });

  // ---- surgery
  auto* surgery = app.add_subcommand("surgery", "tune and apply a local surgery at a marked point");
  std::string s_model = "horseshoe3d", s_point, s_family = "rotation";
  double s_beta = 2, s_scale = 0.05, s_inner = 10, s_outer = 30, s_eta = 0.1;
  surgery->add_option("--model", s_model)->capture_default_str();
  surgery->add_option("--point", s_point, "marked point")->required();
  surgery->add_option("--family", s_family, "rotation or shear")->check(CLI::IsMember({"rotation", "shear"}))->capture_default_str();
  surgery->add_option("--beta", s_beta, "shear strength")->capture_default_str();
  surgery->add_option("--scale", s_scale, "support radius")->capture_default_str();
  surgery->add_option("--inner", s_inner, "inner cone aperture, degrees")->capture_default_str();
  surgery->add_option("--outer", s_outer, "outer cone aperture, degrees")->capture_default_str();
  surgery->add_option("--eta", s_eta)->capture_default_str();
  surgery->callback([&] {
    action = [&] {
      SurgerySpec spec;
      spec.target = s_point;
      spec.scale = s_scale;
      spec.family = s_family == "rotation" ? ModificationFamily::rotation() : ModificationFamily::shear(s_beta);
      spec.inner_aperture = deg(s_inner);
      spec.outer_aperture = deg(s_outer);
      spec.eta = s_eta;
      json sj;
      to_json(sj, spec);
      Report rep = start(g, "surgery", {{"model", s_model}, {"spec", sj}});
      auto m = apply_surgery(make_model(s_model), spec);
      const auto& c = m->certificate();
      MarkedPoint mp = m->marked_point(s_point);
      Mat3 j = Mat3::identity();
      Vec3 x = mp.position;
      for (int k = 0; k < mp.period; ++k) {
        j = m->jacobian(x) * j;
        x = m->wrap(m->forward(x));
      }
      auto e = eigenvalues2({{j(0, 0), j(0, 1), j(1, 0), j(1, 1)}});
      rep.add({"kernel-certificate", status_of(c.pass), {{"scale", s_scale}, {"inner_deg", s_inner}, {"outer_deg", s_outer}, {"eta", s_eta}},
               {{"K", c.K}, {"delta", c.delta}, {"alpha", c.alpha}, {"attempts", c.attempts}}});
      rep.add({"period-jacobian", Status::pass, {{"period", mp.period}},
               {{"stable_dim", mp.stable_dim},
                {"xy_eigenvalues", {{{"re", e.first.real()}, {"im", e.first.imag()}}, {{"re", e.second.real()}, {"im", e.second.imag()}}}},
                {"z_row", jvec(j.row(2))}}});
      return finish(g, rep, {{"surgery.json", sj.dump(2) + "\n"}});
    };
  });

  // ---- scenario
  auto* scenario = app.add_subcommand("scenario", "run named reproduction scenarios");
  std::vector<std::string> names;
  bool list = false;
  scenario->add_option("names", names, "scenario names, or 'all'");
  scenario->add_flag("--list", list, "list scenarios");
  scenario->callback([&] {
    action = [&] {
      if (list || names.empty()) {
        for (const auto& n : scenario_names()) fmt::print("{:<24} {}\n", n, scenario_description(n));
        return list ? 0 : 3;
      }
      if (names.size() == 1 && names[0] == "all") names = scenario_names();
      ScenarioContext ctx;
      ctx.out = g.out;
      ctx.seed = g.seed;
      ctx.config = g.config.value("scenarios", json::object());
      auto reports = run_scenarios(names, ctx, g.jobs);
      int code = 0;
      for (std::size_t i = 0; i < names.size(); ++i) {
        fmt::print("{}\n", names[i]);
        for (const auto& v : reports[i].verdicts) fmt::print("  {:<13} {}\n", to_string(v.status), v.name);
        int c = reports[i].exit_code();
        code = (c == 2 || code == 2) ? 2 : std::max(code, c);
      }
      return code;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  try {
    if (!g.config_path.empty()) g.config = read_json(g.config_path);
    if (g.config.contains("seed") && app.get_option("--seed")->count() == 0) g.seed = g.config.at("seed").get<std::uint64_t>();
    if (g.config.contains("out") && app.get_option("--out")->count() == 0) g.out = g.config.at("out").get<std::string>();
    set_jobs(g.jobs);
    return action();
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
