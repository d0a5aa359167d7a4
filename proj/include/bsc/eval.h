#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bsc {

/// Category labels keyed by query/video id; relevance = same category.
struct GroundTruth {
    std::map<std::string, std::string> query_category;
    std::map<std::string, std::string> video_category;
};

/// Aggregated retrieval metrics. AP is list-local: each query's AP
/// normalizes by the number of relevant items present in its ranked list.
struct MetricReport {
    double map = 0.0;
    double precision_at_k = 0.0;  // mean over queries
    std::size_t k = 0;
    std::vector<std::pair<std::string, double>> per_query_ap;  // ascending query id
    std::size_t zero_relevant_queries = 0;
};

using RelevancePredicate = std::function<bool(const std::string&)>;

/// List-local average precision; 0 when the list holds no relevant item
/// (reported through *no_relevant when given).
double average_precision(const std::vector<std::string>& ranked,
                         const RelevancePredicate& relevant, bool* no_relevant = nullptr);

/// Relevant fraction of the first min(k, |ranked|) items, divided by k, so a
/// query returning nothing scores 0.
double precision_at_k(const std::vector<std::string>& ranked,
                      const RelevancePredicate& relevant, std::size_t k);

/// Ranked video lists keyed by query id.
using Run = std::map<std::string, std::vector<std::string>>;

/// Aggregates AP and P@k over all queries in the run. Unknown query or video
/// ids raise data_error naming every offender.
MetricReport evaluate(const Run& run, const GroundTruth& truth, std::size_t k);

}  // namespace bsc
