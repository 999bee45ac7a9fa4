#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phmp/charted_map.hpp"

namespace phmp {

// uniform subdivision of a box; cells are half-open except the last one on each axis
struct BoxGrid {
  Box3 box;
  std::array<int, 3> n{1, 1, 1};
  std::array<bool, 3> periodic{false, false, false};

  int size() const { return n[0] * n[1] * n[2]; }
  Vec3 cell_size() const;
  int index(int i, int j, int k) const { return (i * n[1] + j) * n[2] + k; }
  std::array<int, 3> coords(int idx) const;
  Box3 cell(int idx) const;
  // cell holding p (periodic axes wrap); nullopt outside the box
  std::optional<int> locate(const Vec3& p) const;
  // cells within Chebyshev distance r of idx
  std::vector<int> neighbourhood(int idx, int r) const;
};

// grid over the chart domain (periodic flags copied)
BoxGrid make_grid(const Chart& chart, int N);
BoxGrid make_grid(const Box3& box, int N);

struct BoxSet {
  BoxGrid grid;
  std::vector<int> boxes;  // sorted, unique

  bool contains(int idx) const;
  std::size_t size() const { return boxes.size(); }
  bool empty() const { return boxes.empty(); }
};

BoxSet full_set(const BoxGrid& grid);
// cells whose centre satisfies pred
template <class Pred>
BoxSet select_boxes(const BoxGrid& grid, Pred pred) {
  BoxSet s{grid, {}};
  for (int i = 0; i < grid.size(); ++i)
    if (pred(grid.cell(i).center())) s.boxes.push_back(i);
  return s;
}
BoxSet dilate(const BoxSet& s, int r);
BoxSet set_union(const BoxSet& a, const BoxSet& b);
// diagonal of the bounding box of the union of cells
double set_diameter(const BoxSet& s);
Box3 set_hull(const BoxSet& s);
// run-length encoding of sorted indices: (first, length) pairs
std::vector<std::pair<int, int>> run_length(const std::vector<int>& sorted);

struct BoxGraph {
  BoxGrid grid;
  std::vector<int> nodes;       // grid indices, sorted
  std::vector<int> node_of;     // grid index -> node, -1 outside the region
  std::vector<std::size_t> offsets;
  std::vector<int> targets;     // node ids
  std::vector<std::uint8_t> exits;  // edge to the virtual outside node
  double epsilon = 0;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const;
  bool has_edge(int from, int to) const;
  std::pair<const int*, const int*> out(int node) const {
    return {targets.data() + offsets[node], targets.data() + offsets[node + 1]};
  }
};

// outer image of one grid cell (hull of corner/face/centre samples joined with the
// Lipschitz box around the centre image); nullopt parts escape the chart
struct CellImage {
  std::vector<Box3> pieces;  // one per branch meeting the cell
  bool undefined = false;    // some sample left the map's domain
};
CellImage outer_image(const ChartedMap& f, const Box3& cell);

BoxGraph build_box_graph(const ChartedMap& f, const BoxSet& region, double epsilon);

struct MorseDecomposition {
  // classes in topological order of the condensation; each a sorted list of grid indices
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of_node;                 // -1 for transient nodes
  std::vector<std::vector<std::uint8_t>> reaches;  // reaches[a][b]: path from class a to class b
  std::size_t scc_count = 0;

  bool precedes(int a, int b) const { return a != b && reaches[a][b]; }
};

MorseDecomposition morse_decomposition(const BoxGraph& g);
BoxSet chain_recurrent_set(const BoxGraph& g, const MorseDecomposition& md);
BoxSet class_set(const BoxGraph& g, const MorseDecomposition& md, int c);

struct AttractingRegion {
  BoxSet boxes;
  bool attracting = false;  // closure never reaches the outside node
  bool strict = false;      // closure of the one-cell dilation stays in the two-cell dilation
};

AttractingRegion attracting_region_boxes(const BoxGraph& g, const BoxSet& seed);
std::vector<int> quasi_attractor_candidates(const BoxGraph& g, const MorseDecomposition& md);
double basin_coverage(const BoxGraph& g, const BoxSet& target);

nlohmann::json to_json(const BoxSet& s);
nlohmann::json summary_json(const BoxGraph& g, const MorseDecomposition& md);

}  // namespace phmp
