#include "distcell/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace distcell {

namespace {

struct FrameMatch {
    std::map<std::int32_t, std::int64_t> ref_size, res_size;
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> overlap;
    std::map<std::int32_t, std::int32_t> ref_to_res; // majority matches only

    FrameMatch(const LabelImage& ref, const LabelImage& res) {
        if (ref.shape() != res.shape())
            throw std::invalid_argument("evaluation: label images must share shape");
        for (std::int64_t i = 0; i < ref.grid.size(); ++i) {
            std::int32_t r = ref.grid[i], s = res.grid[i];
            if (r != 0) ++ref_size[r];
            if (s != 0) ++res_size[s];
            if (r != 0 && s != 0) ++overlap[{r, s}];
        }
        for (const auto& [key, n] : overlap)
            if (2 * n > ref_size[key.first]) ref_to_res[key.first] = key.second;
    }
};

} // namespace

double seg_score(const LabelImage& reference, const LabelImage& result) {
    FrameMatch m(reference, result);
    if (m.ref_size.empty())
        throw std::invalid_argument("seg_score: reference contains no objects");
    double sum = 0.0;
    for (const auto& [r, rsize] : m.ref_size) {
        auto it = m.ref_to_res.find(r);
        if (it == m.ref_to_res.end()) continue;
        const std::int64_t inter = m.overlap.at({r, it->second});
        const std::int64_t uni = rsize + m.res_size.at(it->second) - inter;
        sum += static_cast<double>(inter) / static_cast<double>(uni);
    }
    return sum / static_cast<double>(m.ref_size.size());
}

double seg_score(const std::vector<LabelImage>& reference,
                 const std::vector<LabelImage>& result) {
    if (reference.size() != result.size())
        throw std::invalid_argument("seg_score: sequences must have equal length");
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t t = 0; t < reference.size(); ++t) {
        FrameMatch m(reference[t], result[t]);
        for (const auto& [r, rsize] : m.ref_size) {
            ++count;
            auto it = m.ref_to_res.find(r);
            if (it == m.ref_to_res.end()) continue;
            const std::int64_t inter = m.overlap.at({r, it->second});
            const std::int64_t uni = rsize + m.res_size.at(it->second) - inter;
            sum += static_cast<double>(inter) / static_cast<double>(uni);
        }
    }
    if (count == 0) throw std::invalid_argument("seg_score: reference contains no objects");
    return sum / static_cast<double>(count);
}

namespace {

double f1_from_counts(std::int64_t matched_refs, std::int64_t used_results,
                      std::int64_t n_refs, std::int64_t n_results) {
    if (n_refs == 0 && n_results == 0) return 1.0;
    if (n_refs == 0 || n_results == 0) return 0.0;
    const double recall = static_cast<double>(matched_refs) / n_refs;
    const double precision = static_cast<double>(used_results) / n_results;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

} // namespace

namespace {

// one-to-one true positives: majority matches claimed in ascending reference
// ID order, each result object usable once
std::int64_t claimed_pairs(const FrameMatch& m) {
    std::set<std::int32_t> claimed;
    std::int64_t tp = 0;
    for (const auto& [r, s] : m.ref_to_res)
        if (claimed.insert(s).second) ++tp;
    return tp;
}

} // namespace

double det_simple(const LabelImage& reference, const LabelImage& result) {
    FrameMatch m(reference, result);
    const std::int64_t tp = claimed_pairs(m);
    return f1_from_counts(tp, tp, static_cast<std::int64_t>(m.ref_size.size()),
                          static_cast<std::int64_t>(m.res_size.size()));
}

double det_simple(const std::vector<LabelImage>& reference,
                  const std::vector<LabelImage>& result) {
    if (reference.size() != result.size())
        throw std::invalid_argument("det_simple: sequences must have equal length");
    std::int64_t tp = 0, n_ref = 0, n_res = 0;
    for (std::size_t t = 0; t < reference.size(); ++t) {
        FrameMatch m(reference[t], result[t]);
        tp += claimed_pairs(m);
        n_ref += static_cast<std::int64_t>(m.ref_size.size());
        n_res += static_cast<std::int64_t>(m.res_size.size());
    }
    return f1_from_counts(tp, tp, n_ref, n_res);
}

namespace {

using Link = std::tuple<int, std::int32_t, std::int32_t>; // (t, label_t, label_t+1)

struct Division {
    int time; // parent's last frame
    std::int32_t parent;
    std::set<std::int32_t> kids;
    bool operator<(const Division& o) const {
        return std::tie(time, parent, kids) < std::tie(o.time, o.parent, o.kids);
    }
};

void collect_links(const Lineage& lin, std::set<Link>& links, std::set<Division>& divisions) {
    std::map<std::int32_t, const TrackRecord*> by_label;
    for (const TrackRecord& r : lin.records) by_label[r.label] = &r;

    for (const TrackRecord& r : lin.records)
        for (int t = r.begin; t < r.end; ++t) links.insert({t, r.label, r.label});

    std::map<std::int32_t, std::vector<const TrackRecord*>> children;
    for (const TrackRecord& r : lin.records)
        if (r.parent != 0 && by_label.count(r.parent)) children[r.parent].push_back(&r);
    for (const auto& [pid, kids] : children) {
        const TrackRecord* parent = by_label.at(pid);
        Division d{parent->end, pid, {}};
        for (const TrackRecord* k : kids) {
            links.insert({parent->end, pid, k->label});
            d.kids.insert(k->label);
        }
        if (d.kids.size() >= 2) divisions.insert(d);
    }
}

} // namespace

LineageErrors lineage_errors(const Lineage& reference, const Lineage& result) {
    if (reference.frames.size() != result.frames.size())
        throw std::invalid_argument("lineage_errors: frame ranges must match");

    const int T = static_cast<int>(reference.frames.size());
    std::vector<std::map<std::int32_t, std::int32_t>> map_rr(T);
    for (int t = 0; t < T; ++t)
        map_rr[t] = FrameMatch(reference.frames[t], result.frames[t]).ref_to_res;
    auto mapped = [&](int t, std::int32_t ref_label) -> std::int32_t {
        auto it = map_rr[t].find(ref_label);
        return it == map_rr[t].end() ? 0 : it->second;
    };

    std::set<Link> ref_links, res_links;
    std::set<Division> ref_divs, res_divs;
    collect_links(reference, ref_links, ref_divs);
    collect_links(result, res_links, res_divs);

    LineageErrors err;
    std::set<Link> translated;
    for (const auto& [t, a, b] : ref_links) {
        std::int32_t sa = mapped(t, a), sb = mapped(t + 1, b);
        if (sa == 0 || sb == 0 || !res_links.count({t, sa, sb}))
            ++err.missed_links;
        else
            translated.insert({t, sa, sb});
    }
    for (const Link& l : res_links)
        if (!translated.count(l)) ++err.wrong_links;

    for (const Division& d : ref_divs) {
        Division td{d.time, mapped(d.time, d.parent), {}};
        bool ok = td.parent != 0;
        for (std::int32_t k : d.kids) {
            std::int32_t m = mapped(d.time + 1, k);
            if (m == 0) ok = false;
            td.kids.insert(m);
        }
        if (!ok || !res_divs.count(td)) ++err.missed_divisions;
    }
    return err;
}

ScoreReport score_sequences(const Lineage& reference, const Lineage& result) {
    ScoreReport rep;
    rep.seg = seg_score(reference.frames, result.frames);
    rep.det_simple = det_simple(reference.frames, result.frames);
    rep.tra_errors = lineage_errors(reference, result);

    std::set<Link> ref_links;
    std::set<Division> ref_divs;
    collect_links(reference, ref_links, ref_divs);
    const double denom = std::max<std::size_t>(1, ref_links.size() + ref_divs.size());
    rep.tra_proxy = std::clamp(1.0 - rep.tra_errors.total() / denom, 0.0, 1.0);

    rep.op_csb = 0.5 * (rep.det_simple + rep.seg);
    rep.op_ctb_proxy = 0.5 * (rep.seg + rep.tra_proxy);
    return rep;
}

} // namespace distcell
