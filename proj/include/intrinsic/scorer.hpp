#pragma once

#include <array>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "intrinsic/image.hpp"

namespace intrinsic {

/// Non-negative (w_eq, w_lt, w_gt) triples over ordered pixel pairs.
struct PairwiseScores {
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> w_eq;
    std::vector<double> w_lt;
    std::vector<double> w_gt;

    size_t size() const { return pairs.size(); }
};

/// Pluggable relative-reflectance scorer. score() returns a normalized
/// (eq, lt, gt) probability triple for the ordered pixel pair (i, j).
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::array<double, 3> score(const Image& image, int i, int j) const = 0;
};

/// Scores from a ground-truth reflectance map: the pair is Equal when the
/// intensity ratio stays below 1 + delta, with an eps floor keeping all
/// three weights positive.
class OracleScorer : public Scorer {
public:
    OracleScorer(Image reflectance, double delta = 0.10, double eps = 0.01);
    std::array<double, 3> score(const Image& image, int i, int j) const override;

private:
    Image reflectance_;
    double delta_;
    double eps_;
};

struct BaselineWeights {
    double eq_bias = 1.0;
    double eq_log_intensity = 4.0;   // penalty on |log I_i - log I_j|
    double eq_chromaticity = 8.0;    // penalty on chromaticity distance
    double eq_spatial = 0.5;         // penalty on spatial distance
    double order_log_intensity = 3.0;  // drives lt/gt from signed log ratio
};

/// CNN-free fallback: a 3-class linear softmax over log-intensity difference,
/// chromaticity distance, and spatial distance.
class BaselineScorer : public Scorer {
public:
    explicit BaselineScorer(BaselineWeights w = {}) : w_(w) {}
    std::array<double, 3> score(const Image& image, int i, int j) const override;

private:
    BaselineWeights w_;
};

/// Table-backed scorer answering exactly the pairs it was loaded with.
class PrecomputedScorer : public Scorer {
public:
    explicit PrecomputedScorer(const PairwiseScores& table);
    std::array<double, 3> score(const Image& image, int i, int j) const override;

private:
    std::unordered_map<uint64_t, std::array<double, 3>> table_;
};

/// Read a score table (CSV "image,i,j,w_eq,w_lt,w_gt" or JSON lines with the
/// same fields). Negative or non-finite weights are rejected; triples are
/// normalized.
std::unique_ptr<PrecomputedScorer> load_precomputed(const std::string& path);

void save_score_table(const PairwiseScores& sc, const std::string& image_id,
                      const std::string& path);
PairwiseScores load_score_table(const std::string& path);

/// Evaluate a scorer over a pair list; triples are normalized to sum 1.
PairwiseScores score_pairs(const Scorer& s, const Image& image,
                           const std::vector<std::pair<int, int>>& pairs);

/// Enforce w_eq(i,j) = w_eq(j,i) and w_gt(i,j) = w_lt(j,i) by averaging the
/// two directions; single-orientation pairs are mirrored. Output carries both
/// orientations of every pair.
PairwiseScores symmetrize_scores(const PairwiseScores& sc);

}  // namespace intrinsic
