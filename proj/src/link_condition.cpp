#include "cat0/link_condition.hpp"

namespace cat0 {

LinkConditionVerdict check_link_condition(const Complex2PE& X) {
    LinkConditionVerdict verdict;
    for (int v = 0; v < X.vertex_count(); ++v) {
        auto link = vertex_link(X, v);
        auto loop = shortest_essential_loop(link);
        if (loop.length < verdict.loop_length) {
            verdict.loop_length = loop.length;
            verdict.worst_vertex = v;
            verdict.witness = loop.arcs;
        }
    }
    verdict.pass = !(verdict.loop_length < kTwoPi - kMetricTol);
    return verdict;
}

double link_diameter(const MetricGraph& g) { return metric_graph_diameter(g); }

} // namespace cat0
