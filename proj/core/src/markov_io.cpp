#include <sstream>

#include <nlohmann/json.hpp>

#include "phmp/error.hpp"
#include "phmp/markov.hpp"

namespace phmp {

namespace {

using nlohmann::json;

json box_json(const Box3& b) { return {{b.lo.x, b.lo.y, b.lo.z}, {b.hi.x, b.hi.y, b.hi.z}}; }

Box3 box_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || j[0].size() != 3 || j[1].size() != 3)
    throw Error(ErrorKind::invalid_spec, "box must be [[lo x, y, z], [hi x, y, z]]");
  Box3 b;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = j[0][a].get<double>();
    b.hi[a] = j[1][a].get<double>();
  }
  return b;
}

json region_json(const Region& r) {
  json j{{"box", box_json(r.box)}, {"vertical_axis", r.vertical_axis}};
  if (r.fiber_radius) j["fiber_radius"] = *r.fiber_radius;
  j["boundary"] = r.side_boundary && r.lid_boundary ? "all" : (r.side_boundary ? "side" : "lid");
  return j;
}

Region region_from(const json& j) {
  Region r;
  r.box = box_from(j.at("box"));
  r.vertical_axis = j.value("vertical_axis", 2);
  if (j.contains("fiber_radius") && !j["fiber_radius"].is_null()) r.fiber_radius = j["fiber_radius"].get<double>();
  std::string b = j.value("boundary", "all");
  if (b == "side") r.lid_boundary = false;
  else if (b == "lid") r.side_boundary = false;
  else if (b != "all") throw Error(ErrorKind::invalid_spec, "region boundary must be all, side or lid");
  return r;
}

}  // namespace

json to_json(const MarkovPartition& mp) {
  json rects = json::array();
  for (const auto& r : mp.rectangles) {
    json jr{{"chart", r.chart}, {"box", box_json(r.box)}, {"vertical_axis", r.vertical_axis}, {"label", r.label}};
    jr["fiber_radius"] = r.fiber_radius ? json(*r.fiber_radius) : json(nullptr);
    if (!r.itinerary.empty()) {
      jr["itinerary"] = r.itinerary;
      jr["itinerary_start"] = r.itinerary_start;
    }
    rects.push_back(jr);
  }
  json adj = json::array();
  for (auto [a, b] : mp.adjacency) adj.push_back({a, b});
  json j{{"type", to_string(mp.type)}, {"rectangles", rects}, {"adjacency", adj}};
  if (mp.attracting_region) j["attracting_region"] = region_json(*mp.attracting_region);
  if (mp.repelling_region) j["repelling_region"] = region_json(*mp.repelling_region);
  if (mp.parent) j["parent"] = to_json(*mp.parent);
  if (!mp.strict_lids) j["strict_lids"] = false;
  return j;
}

MarkovPartition partition_from_json(const json& j) {
  try {
    MarkovPartition mp;
    std::string t = j.at("type").get<std::string>();
    if (t == "saddle") mp.type = PartitionType::saddle;
    else if (t == "attracting") mp.type = PartitionType::attracting;
    else throw Error(ErrorKind::invalid_spec, "partition type must be saddle or attracting");
    for (const auto& jr : j.at("rectangles")) {
      Rectangle r;
      r.chart = jr.value("chart", "");
      r.box = box_from(jr.at("box"));
      r.vertical_axis = jr.value("vertical_axis", 2);
      if (jr.contains("fiber_radius") && !jr["fiber_radius"].is_null())
        r.fiber_radius = jr["fiber_radius"].get<double>();
      r.label = jr.value("label", "R" + std::to_string(mp.rectangles.size()));
      if (jr.contains("itinerary")) {
        r.itinerary = jr["itinerary"].get<std::vector<int>>();
        r.itinerary_start = jr.value("itinerary_start", 0);
      }
      mp.rectangles.push_back(r);
    }
    if (j.contains("adjacency"))
      for (const auto& p : j["adjacency"]) mp.adjacency.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    if (j.contains("attracting_region")) mp.attracting_region = region_from(j["attracting_region"]);
    if (j.contains("repelling_region")) mp.repelling_region = region_from(j["repelling_region"]);
    if (j.contains("parent")) mp.parent = std::make_shared<MarkovPartition>(partition_from_json(j["parent"]));
    mp.strict_lids = j.value("strict_lids", true);
    validate(mp);
    return mp;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_spec, std::string("partition file: ") + e.what());
  }
}

json to_json(const PartitionReport& r) {
  json comps = json::array();
  for (const auto& c : r.components) {
    json jc{{"source", c.source},
            {"target", c.target},
            {"kind", to_string(c.kind)},
            {"cells", c.cells},
            {"layers", c.layers},
            {"bottom", c.bottom},
            {"top", c.top},
            {"side_clearance", c.side_clearance},
            {"hull", box_json(c.hull)}};
    if (!c.reason.empty()) jc["reason"] = c.reason;
    comps.push_back(jc);
  }
  json filt = json::array();
  for (const auto& f : r.filtration)
    filt.push_back({{"check", f.what},
                    {"samples", f.samples},
                    {"min_clearance", f.min_clearance},
                    {"worst", {f.worst.x, f.worst.y, f.worst.z}},
                    {"pass", f.pass}});
  json j{{"resolution", r.resolution}, {"margin", r.margin},         {"incidence", r.incidence},
         {"components", comps},        {"filtration", filt},          {"violations", r.violations},
         {"inconclusive", r.inconclusive}, {"pass", r.pass}};
  if (r.inconclusive) j["inconclusive_reason"] = r.inconclusive_reason;
  return j;
}

json to_json(const IncidenceMatrix& m) {
  return {{"labels", m.labels}, {"matrix", m.a}, {"inconclusive", m.inconclusive}};
}

std::string incidence_csv(const IncidenceMatrix& m) {
  std::ostringstream os;
  os << "from";
  for (const auto& l : m.labels) os << ',' << l;
  os << '\n';
  for (std::size_t i = 0; i < m.a.size(); ++i) {
    os << m.labels[i];
    for (int v : m.a[i]) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace phmp
