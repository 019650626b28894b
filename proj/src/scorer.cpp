#include "intrinsic/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "intrinsic/error.hpp"

namespace intrinsic {

namespace {

uint64_t pair_key(int i, int j) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) | static_cast<uint32_t>(j);
}

std::array<double, 3> normalized(std::array<double, 3> w) {
    double sum = w[0] + w[1] + w[2];
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw ValidationError("score triple does not sum to a positive value");
    return {w[0] / sum, w[1] / sum, w[2] / sum};
}

constexpr double kLogFloor = 1e-6;

}  // namespace

OracleScorer::OracleScorer(Image reflectance, double delta, double eps)
    : reflectance_(std::move(reflectance)), delta_(delta), eps_(eps) {}

std::array<double, 3> OracleScorer::score(const Image& /*image*/, int i, int j) const {
    if (i < 0 || j < 0 || i >= reflectance_.pixels() || j >= reflectance_.pixels())
        throw ValidationError("oracle scorer: pixel index out of range");
    double ri = std::max(reflectance_.intensity(i), kLogFloor);
    double rj = std::max(reflectance_.intensity(j), kLogFloor);
    double hi = 1.0 - 2.0 * eps_;
    double ratio = std::max(ri, rj) / std::min(ri, rj);
    if (ratio < 1.0 + delta_) return {hi, eps_, eps_};
    if (ri < rj) return {eps_, hi, eps_};
    return {eps_, eps_, hi};
}

std::array<double, 3> BaselineScorer::score(const Image& image, int i, int j) const {
    if (i < 0 || j < 0 || i >= image.pixels() || j >= image.pixels())
        throw ValidationError("baseline scorer: pixel index out of range");
    double li = std::log(std::max(image.intensity(i), kLogFloor));
    double lj = std::log(std::max(image.intensity(j), kLogFloor));
    double dlog = li - lj;
    auto ci = image.chromaticity(i);
    auto cj = image.chromaticity(j);
    double cdist = std::sqrt((ci[0] - cj[0]) * (ci[0] - cj[0]) +
                             (ci[1] - cj[1]) * (ci[1] - cj[1]) +
                             (ci[2] - cj[2]) * (ci[2] - cj[2]));
    int w = image.width();
    double dx = static_cast<double>(i % w - j % w) / w;
    double dy = static_cast<double>(i / w - j / w) / std::max(1, image.height());
    double sdist = std::sqrt(dx * dx + dy * dy);

    double z_eq = w_.eq_bias - w_.eq_log_intensity * std::abs(dlog) -
                  w_.eq_chromaticity * cdist - w_.eq_spatial * sdist;
    double z_lt = -w_.order_log_intensity * dlog;
    double z_gt = w_.order_log_intensity * dlog;

    double zmax = std::max({z_eq, z_lt, z_gt});
    double e_eq = std::exp(z_eq - zmax);
    double e_lt = std::exp(z_lt - zmax);
    double e_gt = std::exp(z_gt - zmax);
    double sum = e_eq + e_lt + e_gt;
    return {e_eq / sum, e_lt / sum, e_gt / sum};
}

PrecomputedScorer::PrecomputedScorer(const PairwiseScores& table) {
    for (size_t k = 0; k < table.size(); ++k) {
        auto [i, j] = table.pairs[k];
        auto triple = normalized({table.w_eq[k], table.w_lt[k], table.w_gt[k]});
        if (i == j && !(triple[0] > triple[1] && triple[0] > triple[2]))
            throw ValidationError("precomputed scorer: pair (" + std::to_string(i) + ", " +
                                  std::to_string(i) + ") must have a dominant equality weight");
        table_[pair_key(i, j)] = triple;
    }
}

std::array<double, 3> PrecomputedScorer::score(const Image& /*image*/, int i, int j) const {
    auto it = table_.find(pair_key(i, j));
    if (it == table_.end())
        throw ValidationError("precomputed scorer: no score for pair (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
    return it->second;
}

namespace {

void validate_row(double w_eq, double w_lt, double w_gt, const std::string& path) {
    for (double v : {w_eq, w_lt, w_gt}) {
        if (!std::isfinite(v)) throw ValidationError("non-finite weight in " + path);
        if (v < 0.0) throw ValidationError("negative weight in " + path);
    }
}

}  // namespace

PairwiseScores load_score_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open score table: " + path);
    PairwiseScores sc;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int i, j;
        double w_eq, w_lt, w_gt;
        if (line[0] == '{') {
            nlohmann::json row;
            try {
                row = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw IoError("malformed JSON at " + path + ":" + std::to_string(lineno) + ": " +
                              e.what());
            }
            i = row.at("i").get<int>();
            j = row.at("j").get<int>();
            w_eq = row.at("w_eq").get<double>();
            w_lt = row.at("w_lt").get<double>();
            w_gt = row.at("w_gt").get<double>();
        } else {
            if (lineno == 1 && line.find("image") == 0) continue;  // header
            std::istringstream ss(line);
            std::string image, field;
            if (!std::getline(ss, image, ',')) continue;
            auto next = [&](auto& out) {
                if (!std::getline(ss, field, ','))
                    throw IoError("short CSV row at " + path + ":" + std::to_string(lineno));
                out = std::stod(field);
            };
            double di, dj;
            next(di);
            next(dj);
            next(w_eq);
            next(w_lt);
            next(w_gt);
            i = static_cast<int>(di);
            j = static_cast<int>(dj);
        }
        validate_row(w_eq, w_lt, w_gt, path);
        sc.pairs.emplace_back(i, j);
        sc.w_eq.push_back(w_eq);
        sc.w_lt.push_back(w_lt);
        sc.w_gt.push_back(w_gt);
    }
    return sc;
}

void save_score_table(const PairwiseScores& sc, const std::string& image_id,
                      const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open score table for writing: " + tmp);
        out << "image,i,j,w_eq,w_lt,w_gt\n";
        out.precision(17);
        for (size_t k = 0; k < sc.size(); ++k)
            out << image_id << ',' << sc.pairs[k].first << ',' << sc.pairs[k].second << ','
                << sc.w_eq[k] << ',' << sc.w_lt[k] << ',' << sc.w_gt[k] << '\n';
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move " + tmp + " to " + path);
}

std::unique_ptr<PrecomputedScorer> load_precomputed(const std::string& path) {
    return std::make_unique<PrecomputedScorer>(load_score_table(path));
}

PairwiseScores score_pairs(const Scorer& s, const Image& image,
                           const std::vector<std::pair<int, int>>& pairs) {
    PairwiseScores out;
    out.pairs = pairs;
    out.w_eq.reserve(pairs.size());
    out.w_lt.reserve(pairs.size());
    out.w_gt.reserve(pairs.size());
    for (auto [i, j] : pairs) {
        auto triple = normalized(s.score(image, i, j));
        out.w_eq.push_back(triple[0]);
        out.w_lt.push_back(triple[1]);
        out.w_gt.push_back(triple[2]);
    }
    return out;
}

PairwiseScores symmetrize_scores(const PairwiseScores& sc) {
    std::unordered_map<uint64_t, size_t> index;
    for (size_t k = 0; k < sc.size(); ++k)
        index[pair_key(sc.pairs[k].first, sc.pairs[k].second)] = k;

    PairwiseScores out;
    auto push = [&](int i, int j, double w_eq, double w_lt, double w_gt) {
        out.pairs.emplace_back(i, j);
        out.w_eq.push_back(w_eq);
        out.w_lt.push_back(w_lt);
        out.w_gt.push_back(w_gt);
    };

    std::unordered_map<uint64_t, bool> done;
    for (size_t k = 0; k < sc.size(); ++k) {
        auto [i, j] = sc.pairs[k];
        if (done.count(pair_key(i, j))) continue;
        done[pair_key(i, j)] = done[pair_key(j, i)] = true;
        auto rev = index.find(pair_key(j, i));
        if (rev == index.end()) {
            push(i, j, sc.w_eq[k], sc.w_lt[k], sc.w_gt[k]);
            push(j, i, sc.w_eq[k], sc.w_gt[k], sc.w_lt[k]);
        } else {
            size_t m = rev->second;
            double eq = 0.5 * (sc.w_eq[k] + sc.w_eq[m]);
            double gt = 0.5 * (sc.w_gt[k] + sc.w_lt[m]);  // w_gt(i,j) ~ w_lt(j,i)
            double lt = 0.5 * (sc.w_lt[k] + sc.w_gt[m]);
            push(i, j, eq, lt, gt);
            push(j, i, eq, gt, lt);
        }
    }
    return out;
}

}  // namespace intrinsic
