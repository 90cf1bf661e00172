#pragma once

#include "textray/codec.hpp"
#include "textray/geometry.hpp"

#include <array>
#include <cstddef>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace textray {

double smooth_l1(double x);
/// d smooth_l1 / dx.
double smooth_l1_grad(double x);

/// Mean smooth-L1 distance between the two normalized contours over the
/// N-ray grid.
double content_loss(const ShapeVector& pred, const ShapeVector& target, std::size_t n_rays = kDefaultRays);

/// Gradient of content_loss with respect to the predicted coefficients.
std::vector<double> content_loss_grad(const ShapeVector& pred, const ShapeVector& target,
                                      std::size_t n_rays = kDefaultRays);

/// 1 - |p - center| / s, clamped to [0, 1].
double central_weight(Point2 p, const GeometricEncoding& encoding);

/// Sampling probability per positive point, proportional to its weight.
std::vector<double> sampling_probabilities(std::span<const double> weights);

/// Training weights q_i = w_i * M' / sum(w); they sum to M'.
std::vector<double> redistribute_weights(std::span<const double> batch_weights);

enum class PointLabel { positive, negative, ignored };

struct LabelThresholds {
    double negative = 0.1;
    double positive = 0.4;
};

/// Thresholds used for line-level training data.
inline constexpr LabelThresholds kLineLevelThresholds{0.1, 0.4};
/// Word-level data ignores the 0..0.1 band instead.
inline constexpr LabelThresholds kWordLevelThresholds{0.0, 0.1};

/// w < negative -> negative, w > positive -> positive, otherwise ignored.
/// A point outside every ground-truth polygon is negative regardless.
PointLabel classify_point(double w, LabelThresholds thresholds, bool inside_instance = true);

/// Closed size range [lo, hi]; hi may be +infinity.
using LevelRange = std::pair<double, double>;

/// Four-level ranges of the line-level / curved-text configuration.
std::vector<LevelRange> default_level_ranges();
/// Five-level ranges with the extra coarse level.
std::vector<LevelRange> five_level_ranges();

/// Instance scale relative to the longer image side.
double relative_size(double scale, double image_width, double image_height);

/// Every level whose closed range contains `relative_size`.
std::set<std::size_t> assign_levels(double relative_size, std::span<const LevelRange> ranges);

struct RegTriple {
    double scale = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};

struct PointSample {
    Point2 location;
    PointLabel label = PointLabel::negative;
    /// (non-text, text) logits.
    std::array<double, 2> cls_logits{0.0, 0.0};
    ShapeVector shape_pred;
    ShapeVector shape_target;
    RegTriple reg_pred;
    RegTriple reg_target;
    double central_weight = 0.0;

    int cls_target() const noexcept { return label == PointLabel::positive ? 1 : 0; }
};

/// Points of one mini-batch with one training weight per point. Only the
/// weights of positive points are read; negatives always weigh 1.
struct MiniBatch {
    std::vector<PointSample> points;
    std::vector<double> q;

    std::size_t n_reg() const;
    std::size_t n_cls() const;
};

/// Builds q from the central weights of the positive points.
MiniBatch make_mini_batch(std::vector<PointSample> points);

struct LossBreakdown {
    double total = 0.0;
    double cls = 0.0;
    double content = 0.0;
    double reg = 0.0;
    /// Set when the batch has no positive point; content and reg are 0.
    bool no_positives = false;
};

/// Two-class softmax cross-entropy of (non-text, text) logits.
double softmax_cross_entropy(std::array<double, 2> logits, int target);

LossBreakdown aggregate_loss(const MiniBatch& batch, std::size_t n_rays = kDefaultRays);

}  // namespace textray
