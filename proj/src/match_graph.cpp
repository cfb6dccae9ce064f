#include "distcell/match_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace distcell {

void TrackingConfig::validate() const {
    if (delta_t < 0) throw std::invalid_argument("TrackingConfig: delta_t must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("TrackingConfig: alpha must be in (0,1]");
    if (beta < 1.0) throw std::invalid_argument("TrackingConfig: beta must be >= 1");
    for (int e : roi_extent)
        if (e < 1) throw std::invalid_argument("TrackingConfig: roi_extent must be positive");
}

namespace {

double dist(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double s = 0.0;
    for (int ax = 0; ax < 3; ++ax) s += (a[ax] - b[ax]) * (a[ax] - b[ax]);
    return std::sqrt(s);
}

} // namespace

double matching_cost(const std::array<double, 3>& predicted, const ObjectStats& cand) {
    return dist(predicted, cand.centroid);
}

bool split_condition(double parent_size, const ObjectStats& cand_a, const ObjectStats& cand_b,
                     const TrackingConfig& cfg, int ndim) {
    // sort so V_k >= V_n
    const ObjectStats& n = cand_a.size <= cand_b.size ? cand_a : cand_b;
    const ObjectStats& k = cand_a.size <= cand_b.size ? cand_b : cand_a;
    const double vn = static_cast<double>(n.size);
    const double vk = static_cast<double>(k.size);
    const double gamma = cfg.gamma_factor * std::pow(parent_size, 1.0 / ndim);
    return vn / vk > cfg.alpha && (vn + vk) / parent_size < cfg.beta &&
           dist(n.centroid, k.centroid) < gamma;
}

double split_cost(const std::array<double, 3>& predicted, double parent_size,
                  const ObjectStats& cand_a, const ObjectStats& cand_b,
                  const TrackingConfig& cfg, int ndim, double disappearance_cost) {
    if (!split_condition(parent_size, cand_a, cand_b, cfg, ndim))
        return cfg.rho_multiplier * disappearance_cost;
    std::array<double, 3> mid;
    for (int ax = 0; ax < 3; ++ax)
        mid[ax] = 0.5 * (cand_a.centroid[ax] + cand_b.centroid[ax]);
    return dist(predicted, mid);
}

MatchGraph build_graph(const std::vector<TrackObservation>& tracks,
                       const std::vector<ObjectStats>& candidates,
                       const TrackingConfig& cfg, int ndim) {
    cfg.validate();
    MatchGraph g;
    g.n_tracks = static_cast<int>(tracks.size());
    g.n_candidates = static_cast<int>(candidates.size());

    auto add_node = [&](MatchNode n) {
        g.nodes.push_back(n);
        return static_cast<int>(g.nodes.size()) - 1;
    };
    g.source = add_node({MatchNodeKind::Source});
    g.sink = add_node({MatchNodeKind::Sink});
    g.appearance = add_node({MatchNodeKind::Appearance});
    g.disappearance = add_node({MatchNodeKind::Disappearance});

    for (int t = 0; t < g.n_tracks; ++t)
        g.track_node.push_back(add_node({MatchNodeKind::Track, t}));
    for (int c = 0; c < g.n_candidates; ++c)
        g.candidate_node.push_back(add_node({MatchNodeKind::Candidate, -1, c}));

    // in-ROI gating: candidate centroid inside the track's ROI
    std::vector<std::vector<int>> in_roi(tracks.size());
    for (int t = 0; t < g.n_tracks; ++t)
        for (int c = 0; c < g.n_candidates; ++c)
            if (tracks[t].roi.contains(candidates[c].centroid)) in_roi[t].push_back(c);

    g.edges.push_back({g.source, g.appearance, 0.0, g.n_candidates});
    g.edges.push_back({g.disappearance, g.sink, 0.0, std::max(1, g.n_tracks)});
    for (int c = 0; c < g.n_candidates; ++c) {
        g.edges.push_back({g.appearance, g.candidate_node[c], 0.0, 1});
        g.edges.push_back({g.candidate_node[c], g.sink, 0.0, 1});
    }

    for (int t = 0; t < g.n_tracks; ++t) {
        g.edges.push_back({g.source, g.track_node[t], 0.0, 1});
        const double disappearance_cost = tracks[t].roi.max_edge();
        for (int c : in_roi[t])
            g.edges.push_back({g.track_node[t], g.candidate_node[c],
                               matching_cost(tracks[t].predicted_pos, candidates[c]), 1});
        g.edges.push_back({g.track_node[t], g.disappearance, disappearance_cost, 1});
    }

    // split nodes for candidate pairs sharing at least one in-ROI track
    for (int a = 0; a < g.n_candidates; ++a)
        for (int b = a + 1; b < g.n_candidates; ++b) {
            std::vector<int> sharing;
            for (int t = 0; t < g.n_tracks; ++t) {
                bool has_a = std::binary_search(in_roi[t].begin(), in_roi[t].end(), a);
                bool has_b = std::binary_search(in_roi[t].begin(), in_roi[t].end(), b);
                if (has_a && has_b) sharing.push_back(t);
            }
            if (sharing.empty()) continue;
            int split = add_node({MatchNodeKind::Split, -1, a, b});
            for (int t : sharing) {
                double cost = split_cost(tracks[t].predicted_pos, tracks[t].last_size,
                                         candidates[a], candidates[b], cfg, ndim,
                                         tracks[t].roi.max_edge());
                g.edges.push_back({g.track_node[t], split, cost, 1});
            }
            g.edges.push_back({split, g.candidate_node[a], 0.0, 1});
            g.edges.push_back({split, g.candidate_node[b], 0.0, 1});
        }

    return g;
}

namespace {

struct Option {
    int kind; // 0 link, 1 split, 2 disappear
    int a = -1, b = -1;
    double cost = 0.0;
};

struct Solver {
    std::vector<std::vector<Option>> options; // per track, sorted
    std::vector<double> min_rest;             // suffix sums of per-track minima
    std::vector<int> order;                   // track exploration order
    int n_candidates = 0;

    std::vector<uint8_t> used;
    std::vector<Option> chosen, best_chosen;
    double best_cost = std::numeric_limits<double>::infinity();

    void dfs(int depth, double acc) {
        if (depth == static_cast<int>(order.size())) {
            if (acc < best_cost) {
                best_cost = acc;
                best_chosen = chosen;
            }
            return;
        }
        if (acc + min_rest[depth] >= best_cost) return;
        const int t = order[depth];
        for (const Option& opt : options[t]) {
            if (opt.kind == 0 && used[opt.a]) continue;
            if (opt.kind == 1 && (used[opt.a] || used[opt.b])) continue;
            if (opt.kind != 2) {
                used[opt.a] = 1;
                if (opt.kind == 1) used[opt.b] = 1;
            }
            chosen[t] = opt;
            dfs(depth + 1, acc + opt.cost);
            if (opt.kind != 2) {
                used[opt.a] = 0;
                if (opt.kind == 1) used[opt.b] = 0;
            }
        }
    }
};

} // namespace

MatchResult solve_matching(const MatchGraph& g) {
    Solver s;
    s.n_candidates = g.n_candidates;
    s.options.resize(g.n_tracks);

    for (const MatchEdge& e : g.edges) {
        if (g.nodes[e.from].kind != MatchNodeKind::Track) continue;
        const int t = g.nodes[e.from].track;
        const MatchNode& to = g.nodes[e.to];
        if (to.kind == MatchNodeKind::Candidate)
            s.options[t].push_back({0, to.cand_a, -1, e.cost});
        else if (to.kind == MatchNodeKind::Split)
            s.options[t].push_back({1, to.cand_a, to.cand_b, e.cost});
        else if (to.kind == MatchNodeKind::Disappearance)
            s.options[t].push_back({2, -1, -1, e.cost});
    }
    for (auto& opts : s.options)
        std::sort(opts.begin(), opts.end(), [](const Option& x, const Option& y) {
            if (x.cost != y.cost) return x.cost < y.cost;
            if (x.kind != y.kind) return x.kind < y.kind;
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        });

    // fewest options first shrinks the tree; deterministic order
    s.order.resize(g.n_tracks);
    for (int t = 0; t < g.n_tracks; ++t) s.order[t] = t;
    std::stable_sort(s.order.begin(), s.order.end(), [&](int x, int y) {
        return s.options[x].size() < s.options[y].size();
    });

    s.min_rest.assign(g.n_tracks + 1, 0.0);
    for (int d = g.n_tracks - 1; d >= 0; --d) {
        double m = 0.0;
        if (!s.options[s.order[d]].empty()) {
            m = s.options[s.order[d]][0].cost;
            for (const Option& o : s.options[s.order[d]]) m = std::min(m, o.cost);
        }
        s.min_rest[d] = s.min_rest[d + 1] + m;
    }

    s.used.assign(std::max(1, g.n_candidates), 0);
    s.chosen.resize(g.n_tracks);
    s.dfs(0, 0.0);
    if (g.n_tracks > 0 && s.best_chosen.empty())
        throw std::logic_error("solve_matching: no feasible assignment (graph lacks "
                               "disappearance edges)");

    MatchResult res;
    res.total_cost = g.n_tracks == 0 ? 0.0 : s.best_cost;
    std::vector<uint8_t> consumed(std::max(1, g.n_candidates), 0);
    for (int t = 0; t < g.n_tracks; ++t) {
        const Option& o = s.best_chosen[t];
        if (o.kind == 0) {
            res.links.push_back({t, o.a});
            consumed[o.a] = 1;
        } else if (o.kind == 1) {
            res.splits.push_back({t, o.a, o.b});
            consumed[o.a] = consumed[o.b] = 1;
        } else {
            res.disappeared.push_back(t);
        }
    }
    for (int c = 0; c < g.n_candidates; ++c)
        if (!consumed[c]) res.appeared.push_back(c);
    return res;
}

} // namespace distcell
