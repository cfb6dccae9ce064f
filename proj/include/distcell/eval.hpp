#ifndef DISTCELL_EVAL_HPP
#define DISTCELL_EVAL_HPP

#include "distcell/lineage.hpp"

namespace distcell {

struct LineageErrors {
    int missed_links = 0;
    int wrong_links = 0;
    int missed_divisions = 0;

    int total() const { return missed_links + wrong_links + missed_divisions; }
};

struct ScoreReport {
    double seg = 0.0;
    double det_simple = 0.0;
    LineageErrors tra_errors;
    double tra_proxy = 0.0;    // 1 - errors / (#reference links + divisions)
    double op_csb = 0.0;       // 0.5 * (det_simple + seg)
    double op_ctb_proxy = 0.0; // 0.5 * (seg + tra_proxy)
};

// Mean Jaccard over reference objects matched by majority overlap
// (|R ∩ S| > 0.5 |R|, at most one such S exists); unmatched objects score 0.
// An empty reference is an error.
double seg_score(const LabelImage& reference, const LabelImage& result);
double seg_score(const std::vector<LabelImage>& reference,
                 const std::vector<LabelImage>& result);

// F1 over objects under the same majority-overlap matching rule.
double det_simple(const LabelImage& reference, const LabelImage& result);
double det_simple(const std::vector<LabelImage>& reference,
                  const std::vector<LabelImage>& result);

// Temporal links present in exactly one lineage after per-frame
// majority-overlap object matching, plus divisions with mismatched children.
LineageErrors lineage_errors(const Lineage& reference, const Lineage& result);

ScoreReport score_sequences(const Lineage& reference, const Lineage& result);

} // namespace distcell

#endif
