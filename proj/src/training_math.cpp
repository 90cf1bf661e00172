#include "textray/training_math.hpp"

#include "textray/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace textray {

namespace {

void check_degrees(const ShapeVector& pred, const ShapeVector& target) {
    if (pred.degree() != target.degree()) {
        throw DegreeMismatch("content loss between degree " + std::to_string(pred.degree()) + " and " +
                             std::to_string(target.degree()));
    }
}

void check_weights(std::span<const double> weights) {
    if (weights.empty()) throw AllZeroWeights("empty weight list");
    bool any_positive = false;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and >= 0");
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) throw AllZeroWeights("all weights are zero");
}

}  // namespace

double smooth_l1(double x) {
    const double a = std::abs(x);
    return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_grad(double x) {
    if (std::abs(x) < 1.0) return x;
    return x > 0.0 ? 1.0 : -1.0;
}

double content_loss(const ShapeVector& pred, const ShapeVector& target, std::size_t n_rays) {
    check_degrees(pred, target);
    if (n_rays == 0) throw std::invalid_argument("content_loss needs at least one ray");
    double acc = 0.0;
    for (std::size_t i = 0; i < n_rays; ++i) {
        const double theta = grid_angle(i, n_rays);
        acc += smooth_l1(chebyshev_eval(pred, theta) - chebyshev_eval(target, theta));
    }
    return acc / static_cast<double>(n_rays);
}

std::vector<double> content_loss_grad(const ShapeVector& pred, const ShapeVector& target, std::size_t n_rays) {
    check_degrees(pred, target);
    if (n_rays == 0) throw std::invalid_argument("content_loss_grad needs at least one ray");
    const std::size_t n_coeffs = pred.coeffs().size();
    std::vector<double> grad(n_coeffs, 0.0);
    std::vector<double> basis(n_coeffs);
    for (std::size_t i = 0; i < n_rays; ++i) {
        const double theta = grid_angle(i, n_rays);
        chebyshev_basis(theta / std::numbers::pi, basis);
        double diff = 0.0;
        for (std::size_t k = 0; k < n_coeffs; ++k) diff += (pred[k] - target[k]) * basis[k];
        const double g = smooth_l1_grad(diff);
        for (std::size_t k = 0; k < n_coeffs; ++k) grad[k] += g * basis[k];
    }
    for (double& g : grad) g /= static_cast<double>(n_rays);
    return grad;
}

double central_weight(Point2 p, const GeometricEncoding& encoding) {
    if (!(encoding.scale > 0.0)) throw DegenerateScale("central weight needs a positive scale");
    const double w = 1.0 - norm(p - encoding.center) / encoding.scale;
    return std::clamp(w, 0.0, 1.0);
}

std::vector<double> sampling_probabilities(std::span<const double> weights) {
    check_weights(weights);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> out(weights.size());
    std::transform(weights.begin(), weights.end(), out.begin(), [&](double w) { return w / total; });
    return out;
}

std::vector<double> redistribute_weights(std::span<const double> batch_weights) {
    check_weights(batch_weights);
    const double total = std::accumulate(batch_weights.begin(), batch_weights.end(), 0.0);
    const double m = static_cast<double>(batch_weights.size());
    std::vector<double> out(batch_weights.size());
    std::transform(batch_weights.begin(), batch_weights.end(), out.begin(),
                   [&](double w) { return w * m / total; });
    return out;
}

PointLabel classify_point(double w, LabelThresholds thresholds, bool inside_instance) {
    if (!(thresholds.negative >= 0.0) || !(thresholds.negative <= thresholds.positive)) {
        throw BadThresholds("need 0 <= negative threshold <= positive threshold");
    }
    if (!inside_instance) return PointLabel::negative;
    if (w < thresholds.negative) return PointLabel::negative;
    if (w > thresholds.positive) return PointLabel::positive;
    return PointLabel::ignored;
}

std::vector<LevelRange> default_level_ranges() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {{0.0, 0.3}, {0.2, 0.55}, {0.45, 0.8}, {0.7, inf}};
}

std::vector<LevelRange> five_level_ranges() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {{0.0, 0.25}, {0.15, 0.45}, {0.35, 0.65}, {0.55, 0.85}, {0.75, inf}};
}

double relative_size(double scale, double image_width, double image_height) {
    const double longer = std::max(image_width, image_height);
    if (!(longer > 0.0)) throw std::invalid_argument("image side must be positive");
    return scale / longer;
}

std::set<std::size_t> assign_levels(double relative_size, std::span<const LevelRange> ranges) {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        if (relative_size >= ranges[i].first && relative_size <= ranges[i].second) out.insert(i);
    }
    return out;
}

std::size_t MiniBatch::n_reg() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const auto& p) { return p.label == PointLabel::positive; }));
}

std::size_t MiniBatch::n_cls() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const auto& p) { return p.label != PointLabel::ignored; }));
}

MiniBatch make_mini_batch(std::vector<PointSample> points) {
    MiniBatch batch;
    batch.q.assign(points.size(), 1.0);
    std::vector<double> weights;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].label == PointLabel::positive) {
            weights.push_back(points[i].central_weight);
            index.push_back(i);
        }
    }
    if (!weights.empty()) {
        const auto q = redistribute_weights(weights);
        for (std::size_t j = 0; j < index.size(); ++j) batch.q[index[j]] = q[j];
    }
    batch.points = std::move(points);
    return batch;
}

double softmax_cross_entropy(std::array<double, 2> logits, int target) {
    const double hi = std::max(logits[0], logits[1]);
    const double lse = hi + std::log(std::exp(logits[0] - hi) + std::exp(logits[1] - hi));
    return lse - logits[target == 1 ? 1 : 0];
}

LossBreakdown aggregate_loss(const MiniBatch& batch, std::size_t n_rays) {
    if (batch.q.size() != batch.points.size()) throw std::invalid_argument("one training weight per point");
    const std::size_t n_cls = batch.n_cls();
    if (n_cls == 0) throw EmptyBatch("mini-batch has no positive or negative point");
    const std::size_t n_reg = batch.n_reg();

    LossBreakdown out;
    double cls = 0.0, content = 0.0, reg = 0.0;
    for (std::size_t i = 0; i < batch.points.size(); ++i) {
        const auto& p = batch.points[i];
        if (p.label == PointLabel::ignored) continue;
        const bool positive = p.label == PointLabel::positive;
        const double q = positive ? batch.q[i] : 1.0;
        cls += q * softmax_cross_entropy(p.cls_logits, p.cls_target());
        if (!positive) continue;
        content += q * content_loss(p.shape_pred, p.shape_target, n_rays);
        reg += q *
               (smooth_l1(p.reg_pred.scale - p.reg_target.scale) + smooth_l1(p.reg_pred.dx - p.reg_target.dx) +
                smooth_l1(p.reg_pred.dy - p.reg_target.dy)) /
               3.0;
    }
    out.cls = cls / static_cast<double>(n_cls);
    if (n_reg == 0) {
        out.no_positives = true;
    } else {
        out.content = content / static_cast<double>(n_reg);
        out.reg = reg / static_cast<double>(n_reg);
    }
    out.total = out.cls + out.content + out.reg;
    return out;
}

}  // namespace textray
