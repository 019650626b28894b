#pragma once

#include <vector>

namespace intrinsic {

/// Dinic max-flow on double capacities. After max_flow(), source_side()
/// reports the minimal source-side min cut (residual reachability from s).
class MaxFlowGraph {
public:
    explicit MaxFlowGraph(int nodes);

    void add_edge(int u, int v, double cap, double rev_cap = 0.0);
    double max_flow(int s, int t);
    bool source_side(int v) const { return level_[v] >= 0; }

private:
    struct Arc {
        int to;
        double cap;
        size_t rev;
    };
    std::vector<std::vector<Arc>> graph_;
    std::vector<int> level_;
    std::vector<size_t> iter_;

    bool bfs(int s, int t);
    double dfs(int v, int t, double flow);
};

/// Pseudo-boolean energy with submodular pairwise terms, minimized exactly by
/// one min cut. Labels: y=1 is the source side; minimize() returns the
/// pointwise-minimal optimal assignment.
class BinarySubmodularEnergy {
public:
    explicit BinarySubmodularEnergy(int vars);

    void add_constant(double c) { constant_ += c; }
    void add_unary(int v, double e0, double e1);
    /// Requires e01 + e10 >= e00 + e11.
    void add_pairwise(int u, int v, double e00, double e01, double e10, double e11);

    struct Result {
        double energy;
        std::vector<bool> labels;
    };
    Result minimize();

private:
    int vars_;
    double constant_ = 0.0;
    std::vector<double> linear_;  // coefficient of y_v
    struct Coupling {
        int u, v;
        double weight;  // cost when y_v = 1 and y_u = 0
    };
    std::vector<Coupling> couplings_;
};

}  // namespace intrinsic
