#ifndef DISTCELL_MATCH_GRAPH_HPP
#define DISTCELL_MATCH_GRAPH_HPP

#include "distcell/grid.hpp"

#include <vector>

namespace distcell {

struct TrackingConfig {
    int delta_t = 3;
    double alpha = 0.5;
    double beta = 1.2;
    double gamma_factor = 2.0;                  // gamma = gamma_factor * V^(1/D)
    std::array<int, 3> roi_extent{1, 150, 150}; // (z,y,x); 3D default 100^3
    double rho_multiplier = 10.0;               // split miss cost = multiplier * disappearance
    bool track_all = true;

    static TrackingConfig defaults(int ndim) {
        TrackingConfig c;
        c.roi_extent = ndim == 3 ? std::array<int, 3>{100, 100, 100}
                                 : std::array<int, 3>{1, 150, 150};
        return c;
    }

    void validate() const;
};

// Axis-aligned per-track search window, center (z,y,x) + full extents.
struct Roi {
    std::array<double, 3> center{};
    std::array<int, 3> extent{1, 1, 1};

    bool contains(const std::array<double, 3>& p) const {
        for (int ax = 0; ax < 3; ++ax) {
            double half = extent[ax] / 2.0;
            if (p[ax] < center[ax] - half || p[ax] > center[ax] + half) return false;
        }
        return true;
    }
    int max_edge() const { return std::max(extent[0], std::max(extent[1], extent[2])); }
};

// What the matching graph needs to know about one active track.
struct TrackObservation {
    int track_id = 0;
    std::array<double, 3> predicted_pos{}; // p_tlast + accumulated estimated shift
    double last_size = 0.0;                // V at t_last
    Roi roi;                               // at t+1, after movement update
};

// Eq 5: Euclidean distance between the track's estimated position and the
// candidate centroid.
double matching_cost(const std::array<double, 3>& predicted, const ObjectStats& cand);

// Eq 8. Candidates are ordered internally so the bigger size is the
// denominator of the ratio test.
bool split_condition(double parent_size, const ObjectStats& cand_a, const ObjectStats& cand_b,
                     const TrackingConfig& cfg, int ndim);

// Eq 7: distance to the candidates' midpoint when the split condition holds,
// rho_multiplier times the disappearance cost otherwise.
double split_cost(const std::array<double, 3>& predicted, double parent_size,
                  const ObjectStats& cand_a, const ObjectStats& cand_b,
                  const TrackingConfig& cfg, int ndim, double disappearance_cost);

enum class MatchNodeKind { Source, Sink, Track, Candidate, Appearance, Disappearance, Split };

struct MatchNode {
    MatchNodeKind kind;
    int track = -1;  // index into the observation list (Track nodes)
    int cand_a = -1; // candidate index (Candidate and Split nodes)
    int cand_b = -1; // second candidate (Split nodes)
};

struct MatchEdge {
    int from = -1, to = -1;
    double cost = 0.0;
    int capacity = 1;
};

// Coupled min-cost flow graph: source feeds every track node and the
// appearance node; track nodes connect to in-ROI candidates, to split nodes
// of in-ROI candidate pairs and to the disappearance node; every split node
// has exactly two outgoing edges (one per candidate); candidates drain to the
// sink. A selected split edge forces flow on both of its node's outgoing
// edges (the coupling constraint).
struct MatchGraph {
    std::vector<MatchNode> nodes;
    std::vector<MatchEdge> edges;
    int source = -1, sink = -1, appearance = -1, disappearance = -1;
    int n_tracks = 0, n_candidates = 0;
    std::vector<int> track_node;     // node index per track
    std::vector<int> candidate_node; // node index per candidate
};

struct MatchResult {
    std::vector<std::pair<int, int>> links;       // (track, candidate) indices
    std::vector<std::array<int, 3>> splits;       // (track, candidate, candidate)
    std::vector<int> disappeared;                 // track indices
    std::vector<int> appeared;                    // candidate indices
    double total_cost = 0.0;
};

MatchGraph build_graph(const std::vector<TrackObservation>& tracks,
                       const std::vector<ObjectStats>& candidates,
                       const TrackingConfig& cfg, int ndim);

// Exact branch-and-bound over the coupled edge-selection problem. Every track
// emits exactly one unit (link, split or disappearance), every candidate
// absorbs at most one. Ties prefer links over splits over disappearance, then
// lower candidate IDs.
MatchResult solve_matching(const MatchGraph& graph);

} // namespace distcell

#endif
