#pragma once

#include "textray/geometry.hpp"
#include "textray/postprocess.hpp"

#include <cstddef>
#include <vector>

namespace textray {

struct Match {
    std::size_t detection;
    std::size_t ground_truth;
    double iou;

    friend bool operator==(const Match&, const Match&) = default;
};

struct EvalCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t ignored_hits = 0;

    EvalCounts& operator+=(const EvalCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        ignored_hits += o.ignored_hits;
        return *this;
    }
    friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    std::vector<Match> matches;
    EvalCounts counts;
};

inline constexpr double kDefaultIouThreshold = 0.5;

/// P/R/F from raw counts; P is 0 without countable detections and R is 0
/// without countable ground truth.
EvalReport report_from_counts(const EvalCounts& counts);

/// Greedy one-to-one matching in descending score order (input index on
/// ties). Detections whose best overlap is an ignored instance count
/// neither as true nor false positives.
EvalReport evaluate(const std::vector<Detection>& detections, const std::vector<Polygon>& ground_truth,
                    const std::vector<bool>& ignore_flags, double iou_thresh = kDefaultIouThreshold);

/// Sums counts over images and computes P/R/F once. Matches are dropped.
EvalReport pool_reports(const std::vector<EvalReport>& per_image);

/// Mean of per-image P/R, with F recomputed from those means.
EvalReport average_reports(const std::vector<EvalReport>& per_image);

}  // namespace textray
