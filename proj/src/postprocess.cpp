#include "textray/postprocess.hpp"

#include "textray/errors.hpp"

#include <algorithm>
#include <cmath>

namespace textray {

Polygon resample_perimeter(const Polygon& polygon, std::size_t n_points) {
    if (n_points < 3) throw std::invalid_argument("resample_perimeter needs at least 3 points");
    validate(polygon);
    const std::size_t n = polygon.size();
    std::vector<double> cumulative(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        cumulative[i + 1] = cumulative[i] + norm(polygon.edge_end(i) - polygon.edge_start(i));
    }
    const double total = cumulative[n];
    const double step = total / static_cast<double>(n_points);

    std::vector<Point2> out;
    out.reserve(n_points);
    std::size_t edge = 0;
    for (std::size_t j = 0; j < n_points; ++j) {
        const double target = step * static_cast<double>(j);
        while (edge + 1 < n && cumulative[edge + 1] <= target) ++edge;
        const double len = cumulative[edge + 1] - cumulative[edge];
        const double t = len > 0.0 ? (target - cumulative[edge]) / len : 0.0;
        const Point2 a = polygon.edge_start(edge);
        const Point2 b = polygon.edge_end(edge);
        out.push_back(t == 0.0 ? a : a + t * (b - a));
    }
    return Polygon(std::move(out));
}

std::vector<Detection> soft_nms(std::vector<Detection> detections, double sigma, double score_floor) {
    if (!(sigma > 0.0)) throw std::invalid_argument("soft_nms sigma must be positive");
    struct Entry {
        std::size_t index;
        Detection det;
    };
    std::vector<Entry> pending;
    pending.reserve(detections.size());
    for (std::size_t i = 0; i < detections.size(); ++i) pending.push_back({i, std::move(detections[i])});

    std::vector<Detection> kept;
    while (!pending.empty()) {
        auto best = std::min_element(pending.begin(), pending.end(), [](const Entry& l, const Entry& r) {
            if (l.det.score != r.det.score) return l.det.score > r.det.score;
            return l.index < r.index;
        });
        Entry chosen = std::move(*best);
        pending.erase(best);
        for (auto& e : pending) {
            const double iou = polygon_iou(chosen.det.polygon, e.det.polygon);
            e.det.score *= std::exp(-(iou * iou) / sigma);
        }
        std::erase_if(pending, [&](const Entry& e) { return e.det.score < score_floor; });
        kept.push_back(std::move(chosen.det));
    }
    return kept;
}

std::vector<Detection> threshold_detections(const std::vector<Detection>& detections, double min_score) {
    if (!(min_score >= 0.0 && min_score <= 1.0)) throw std::invalid_argument("min_score must be in [0, 1]");
    std::vector<Detection> out;
    std::copy_if(detections.begin(), detections.end(), std::back_inserter(out),
                 [&](const Detection& d) { return d.score > min_score; });
    return out;
}

std::vector<Detection> postprocess(const std::vector<ScoredEncoding>& predictions, const PostprocessOptions& options) {
    std::vector<Detection> decoded;
    decoded.reserve(predictions.size());
    for (const auto& p : predictions) {
        if (!(p.score > options.min_score)) continue;
        try {
            decoded.push_back({decode(p.encoding, options.n_rays), p.score, p.level});
        } catch (const InvalidPolygon&) {
            // Contour collapsed to the pole; nothing to report.
        }
    }
    auto kept = soft_nms(std::move(decoded), options.sigma, options.score_floor);
    if (options.output_points == 0) return kept;
    for (auto& d : kept) {
        if (is_simple(d.polygon)) d.polygon = resample_perimeter(d.polygon, options.output_points);
    }
    return kept;
}

}  // namespace textray
