#include "textray/evaluation.hpp"

#include "textray/errors.hpp"

#include <algorithm>
#include <numeric>

namespace textray {

namespace {

double f_measure(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

EvalReport report_from_counts(const EvalCounts& counts) {
    EvalReport out;
    out.counts = counts;
    const std::size_t countable = counts.tp + counts.fp;
    const std::size_t relevant = counts.tp + counts.fn;
    out.precision = countable ? static_cast<double>(counts.tp) / static_cast<double>(countable) : 0.0;
    out.recall = relevant ? static_cast<double>(counts.tp) / static_cast<double>(relevant) : 0.0;
    out.f_measure = f_measure(out.precision, out.recall);
    return out;
}

EvalReport evaluate(const std::vector<Detection>& detections, const std::vector<Polygon>& ground_truth,
                    const std::vector<bool>& ignore_flags, double iou_thresh) {
    if (ignore_flags.size() != ground_truth.size()) {
        throw MisalignedInputs("ignore flags and ground truth differ in length");
    }
    if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) throw std::invalid_argument("iou_thresh must be in (0, 1)");

    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return detections[l].score > detections[r].score; });

    std::vector<bool> matched(ground_truth.size(), false);
    EvalCounts counts;
    std::vector<Match> matches;
    for (std::size_t d : order) {
        double best_iou = -1.0;
        std::size_t best_gt = 0;
        for (std::size_t g = 0; g < ground_truth.size(); ++g) {
            if (matched[g]) continue;
            const double iou = polygon_iou(detections[d].polygon, ground_truth[g]);
            if (iou > best_iou) {
                best_iou = iou;
                best_gt = g;
            }
        }
        if (best_iou >= iou_thresh) {
            if (ignore_flags[best_gt]) {
                ++counts.ignored_hits;
            } else {
                matched[best_gt] = true;
                matches.push_back({d, best_gt, best_iou});
                ++counts.tp;
            }
        } else {
            ++counts.fp;
        }
    }
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
        if (!ignore_flags[g] && !matched[g]) ++counts.fn;
    }
    EvalReport out = report_from_counts(counts);
    out.matches = std::move(matches);
    return out;
}

EvalReport pool_reports(const std::vector<EvalReport>& per_image) {
    EvalCounts total;
    for (const auto& r : per_image) total += r.counts;
    return report_from_counts(total);
}

EvalReport average_reports(const std::vector<EvalReport>& per_image) {
    EvalReport out;
    if (per_image.empty()) return out;
    for (const auto& r : per_image) {
        out.counts += r.counts;
        out.precision += r.precision;
        out.recall += r.recall;
    }
    out.precision /= static_cast<double>(per_image.size());
    out.recall /= static_cast<double>(per_image.size());
    out.f_measure = f_measure(out.precision, out.recall);
    return out;
}

}  // namespace textray
