#pragma once

#include <string>
#include <vector>

namespace intrinsic {

enum class Relation { Equal, Less, Greater };
enum class Provenance { Original, Symmetry, Transitive };

Relation flip(Relation r);
const char* to_string(Relation r);
const char* to_string(Provenance p);

/// A judged location, with coordinates as fractions of the image extent.
struct Point {
    int id = 0;
    double x = 0.0;  // in [0,1], fraction of width
    double y = 0.0;  // in [0,1], fraction of height
};

/// One pairwise reflectance judgment: r_i <relation> r_j.
struct Judgment {
    int i = 0;
    int j = 0;
    Relation relation = Relation::Equal;
    double confidence = 1.0;
    Provenance provenance = Provenance::Original;
};

/// Sparse pairwise-comparison graph for one image.
/// At most one judgment per ordered pair (i, j).
struct ComparisonGraph {
    std::string image_id;
    std::vector<Point> points;
    std::vector<Judgment> judgments;
};

/// Parse one per-image annotation file (schema: image/points/comparisons,
/// "darker" in {"1","2","E"} on (point1, point2)). Duplicate ordered pairs and
/// dangling point ids are rejected.
ComparisonGraph load_annotations(const std::string& path);

/// Write a graph in the same schema, with a "provenance" field per comparison.
void save_annotations(const ComparisonGraph& g, const std::string& path);

/// Keep only judgments with confidence >= min_conf.
ComparisonGraph filter_by_confidence(const ComparisonGraph& g, double min_conf);

/// For every (i,j) lacking a reverse judgment, add (j,i) with the relation
/// flipped (Less <-> Greater) or kept (Equal). Existing judgments are never
/// overwritten.
ComparisonGraph symmetrize(const ComparisonGraph& g);

struct ClosureResult {
    ComparisonGraph graph;
    bool truncated = false;  // max_rounds exhausted before fixpoint
    int rounds = 0;
};

/// Complete unjudged pairs through common neighbors until fixpoint (or
/// max_rounds). A pair is completed only when every determinate two-step
/// chain through a common neighbor implies the same relation; conflicting
/// pairs are left open. Derived judgments carry the minimum confidence along
/// the first inducing chain and Provenance::Transitive. Expects a symmetrized
/// graph.
ClosureResult transitive_closure(const ComparisonGraph& g, int max_rounds = 16);

}  // namespace intrinsic
