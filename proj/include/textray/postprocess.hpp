#pragma once

#include "textray/codec.hpp"
#include "textray/geometry.hpp"

#include <cstddef>
#include <vector>

namespace textray {

struct Detection {
    Polygon polygon;
    double score = 0.0;
    std::size_t level = 0;
};

/// An encoding predicted at some location, before decoding.
struct ScoredEncoding {
    GeometricEncoding encoding;
    double score = 0.0;
    std::size_t level = 0;
};

inline constexpr double kDefaultSoftNmsSigma = 0.5;
inline constexpr double kDefaultSoftNmsFloor = 0.001;
inline constexpr std::size_t kOutputContourPoints = 36;

/// `n_points` vertices at equal arc-length spacing along the closed
/// boundary, starting at vertex 0.
Polygon resample_perimeter(const Polygon& polygon, std::size_t n_points);

/// Gaussian Soft-NMS: repeatedly take the highest score (lowest input index
/// on ties), decay the rest by exp(-IoU^2 / sigma), drop anything that
/// falls below `score_floor`. Output is in selection order, which is
/// non-increasing in score.
std::vector<Detection> soft_nms(std::vector<Detection> detections, double sigma = kDefaultSoftNmsSigma,
                                double score_floor = kDefaultSoftNmsFloor);

/// Keeps detections with score > min_score, preserving order.
std::vector<Detection> threshold_detections(const std::vector<Detection>& detections, double min_score);

struct PostprocessOptions {
    std::size_t n_rays = kDefaultRays;
    double min_score = 0.95;
    double sigma = kDefaultSoftNmsSigma;
    double score_floor = kDefaultSoftNmsFloor;
    /// 0 keeps the decoded N-vertex contour.
    std::size_t output_points = kOutputContourPoints;
};

/// Decode, score threshold, Soft-NMS, then perimeter resampling.
std::vector<Detection> postprocess(const std::vector<ScoredEncoding>& predictions, const PostprocessOptions& options);

}  // namespace textray
