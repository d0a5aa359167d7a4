#include "bsc/eval.h"

#include "bsc/types.h"

#include <algorithm>
#include <set>

namespace bsc {

double average_precision(const std::vector<std::string>& ranked,
                         const RelevancePredicate& relevant, bool* no_relevant) {
    std::size_t total_relevant = 0;
    for (const std::string& id : ranked) {
        if (relevant(id)) ++total_relevant;
    }
    if (no_relevant) *no_relevant = (total_relevant == 0);
    if (total_relevant == 0) return 0.0;

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
        if (relevant(ranked[pos])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(pos + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const RelevancePredicate& relevant, std::size_t k) {
    if (k < 1) throw std::invalid_argument("precision_at_k: k must be >= 1");
    std::size_t hits = 0;
    const std::size_t cutoff = std::min(k, ranked.size());
    for (std::size_t pos = 0; pos < cutoff; ++pos) {
        if (relevant(ranked[pos])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

MetricReport evaluate(const Run& run, const GroundTruth& truth, std::size_t k) {
    if (run.empty()) throw std::invalid_argument("evaluate: empty run");

    std::set<std::string> unknown;
    for (const auto& [query_id, ranked] : run) {
        if (!truth.query_category.count(query_id)) unknown.insert(query_id);
        for (const std::string& video_id : ranked) {
            if (!truth.video_category.count(video_id)) unknown.insert(video_id);
        }
    }
    if (!unknown.empty()) {
        std::string message = "evaluate: ids missing from ground truth:";
        for (const std::string& id : unknown) message += " " + id;
        throw data_error(message);
    }

    MetricReport report;
    report.k = k;
    double ap_sum = 0.0;
    double pk_sum = 0.0;
    for (const auto& [query_id, ranked] : run) {
        const std::string& category = truth.query_category.at(query_id);
        auto relevant = [&](const std::string& video_id) {
            return truth.video_category.at(video_id) == category;
        };
        bool no_relevant = false;
        double ap = average_precision(ranked, relevant, &no_relevant);
        if (no_relevant) ++report.zero_relevant_queries;
        ap_sum += ap;
        pk_sum += precision_at_k(ranked, relevant, k);
        report.per_query_ap.emplace_back(query_id, ap);
    }
    const double count = static_cast<double>(run.size());
    report.map = ap_sum / count;
    report.precision_at_k = pk_sum / count;
    return report;
}

}  // namespace bsc
