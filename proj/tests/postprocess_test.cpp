#include "textray/errors.hpp"
#include "textray/postprocess.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace textray {
namespace {

struct Box {
    double x0, y0, x1, y1;
};

Polygon box_polygon(const Box& b) { return Polygon({{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}}); }

double box_iou(const Box& a, const Box& b) {
    const double w = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
    const double h = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
    const double inter = w * h;
    const double uni = (a.x1 - a.x0) * (a.y1 - a.y0) + (b.x1 - b.x0) * (b.y1 - b.y0) - inter;
    return inter / uni;
}

/// Classic greedy NMS: keep the best remaining box, discard every box with
/// IoU above `thresh` against it.
std::vector<std::size_t> hard_nms(const std::vector<Box>& boxes, const std::vector<double>& scores, double thresh) {
    std::vector<std::size_t> order(boxes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return scores[l] > scores[r]; });
    std::vector<bool> dead(boxes.size(), false);
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
        if (dead[i]) continue;
        kept.push_back(i);
        for (std::size_t j : order) {
            if (!dead[j] && j != i && box_iou(boxes[i], boxes[j]) > thresh) dead[j] = true;
        }
    }
    return kept;
}

double perimeter_of(const std::vector<Point2>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += std::hypot(v[(i + 1) % v.size()].x - v[i].x, v[(i + 1) % v.size()].y - v[i].y);
    return acc;
}

/// Arc-length coordinate of a boundary point, measured from vertex 0.
double arc_position(const std::vector<Point2>& ring, Point2 q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 a = ring[i], b = ring[(i + 1) % ring.size()];
        if (oracle::seg_dist(q, a, b) < 1e-9) return acc + std::hypot(q.x - a.x, q.y - a.y);
        acc += std::hypot(b.x - a.x, b.y - a.y);
    }
    return -1.0;
}

TEST(ResamplePerimeter, UnitSquareFour) {
    const Polygon sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const Polygon r = resample_perimeter(sq, 4);
    EXPECT_EQ(r.vertices(), sq.vertices());
}

TEST(ResamplePerimeter, UnitSquareEight) {
    const Polygon sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const Polygon r = resample_perimeter(sq, 8);
    const Point2 expected[8] = {{0, 0}, {0.5, 0}, {1, 0}, {1, 0.5}, {1, 1}, {0.5, 1}, {0, 1}, {0, 0.5}};
    ASSERT_EQ(r.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(r[i].x, expected[i].x, 1e-15);
        EXPECT_NEAR(r[i].y, expected[i].y, 1e-15);
    }
}

TEST(ResamplePerimeter, DecodedContourToThirtySix) {
    const GeometricEncoding enc{ShapeVector({0.8, 0.1, 0.05}), 40.0, {100, 100}};
    const Polygon contour = decode(enc, 360);
    const Polygon r = resample_perimeter(contour, kOutputContourPoints);
    ASSERT_EQ(r.size(), 36u);
    EXPECT_EQ(r[0], contour[0]);
    const double step = perimeter(contour) / 36.0;
    for (std::size_t i = 0; i < 36; ++i) {
        double d = 1e300;
        for (std::size_t e = 0; e < contour.size(); ++e) d = std::min(d, oracle::seg_dist(r[i], contour.edge_start(e), contour.edge_end(e)));
        EXPECT_LT(d, 1e-9);
    }
    // Chords never exceed the arc length between samples.
    for (std::size_t i = 0; i < 36; ++i) EXPECT_LE(norm(r.edge_end(i) - r[i]), step + 1e-9);
}

TEST(ResamplePerimeter, ArcLengthGapsSumToPerimeter) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point2> v;
        for (int i = 0; i < 17; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 17.0;
            const double r = 10.0 * u(rng);
            v.push_back({r * std::cos(t), r * std::sin(t)});
        }
        const Polygon p(v);
        const Polygon r = resample_perimeter(p, 50);
        // Arc-length gaps between consecutive samples, measured along the
        // original boundary, are all P / n and so sum to P.
        const double total = perimeter_of(v);
        double sum = 0.0;
        for (std::size_t j = 0; j < 50; ++j) {
            double gap = arc_position(v, r[(j + 1) % 50]) - arc_position(v, r[j]);
            if (gap <= 0.0) gap += total;
            EXPECT_NEAR(gap, total / 50.0, 1e-9 * total);
            sum += gap;
        }
        EXPECT_NEAR(sum, total, 1e-9 * total);
        EXPECT_LE(perimeter_of(r.vertices()), total * (1.0 + 1e-9));
        for (const auto& q : r.vertices()) {
            double d = 1e300;
            for (std::size_t e = 0; e < p.size(); ++e) d = std::min(d, oracle::seg_dist(q, p.edge_start(e), p.edge_end(e)));
            EXPECT_LT(d, 1e-9);
        }
    }
    EXPECT_THROW(resample_perimeter(Polygon({{0, 0}, {1, 0}, {0, 1}}), 2), std::invalid_argument);
}

TEST(SoftNms, Single) {
    const auto out = soft_nms({{box_polygon({0, 0, 1, 1}), 0.7, 0}});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].score, 0.7);
}

TEST(SoftNms, DisjointUnchanged) {
    const auto out = soft_nms({{box_polygon({0, 0, 1, 1}), 0.6, 0}, {box_polygon({5, 5, 6, 6}), 0.9, 1}});
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].score, 0.9);
    EXPECT_EQ(out[0].level, 1u);
    EXPECT_EQ(out[1].score, 0.6);
}

TEST(SoftNms, IdenticalPolygonsDecay) {
    const Polygon p = box_polygon({0, 0, 3, 2});
    const auto out = soft_nms({{p, 0.9, 0}, {p, 0.8, 0}}, 0.5);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].score, 0.9);
    EXPECT_NEAR(out[1].score, 0.8 * std::exp(-1.0 / 0.5), 1e-12);
    EXPECT_NEAR(out[1].score, 0.1083, 1e-4);
}

TEST(SoftNms, PartialOverlapDecay) {
    const Box a{0, 0, 2, 1}, b{1, 0, 3, 1};
    const auto out = soft_nms({{box_polygon(a), 0.5, 0}, {box_polygon(b), 0.4, 0}}, 0.5);
    const double iou = box_iou(a, b);
    EXPECT_NEAR(out[1].score, 0.4 * std::exp(-iou * iou / 0.5), 1e-12);
}

TEST(SoftNms, TiesByInputIndexAndFloor) {
    const Polygon p = box_polygon({0, 0, 1, 1});
    const auto out = soft_nms({{p, 0.5, 7}, {p, 0.5, 3}}, 1e-3, 0.001);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].level, 7u);
    EXPECT_THROW(soft_nms({}, 0.0), std::invalid_argument);
    EXPECT_TRUE(soft_nms({}).empty());
}

TEST(SoftNms, NeverIncreasesAndTopSurvives) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> pos(0.0, 20.0), size(2.0, 8.0), score(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Detection> dets;
        double top = -1.0;
        for (int i = 0; i < 12; ++i) {
            const double x = pos(rng), y = pos(rng);
            dets.push_back({box_polygon({x, y, x + size(rng), y + size(rng)}), score(rng), 0});
            top = std::max(top, dets.back().score);
        }
        const auto out = soft_nms(dets);
        ASSERT_FALSE(out.empty());
        EXPECT_EQ(out[0].score, top);
        for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LE(out[i].score, out[i - 1].score);
        for (const auto& o : out) {
            const auto it = std::find_if(dets.begin(), dets.end(), [&](const Detection& d) { return d.polygon == o.polygon; });
            ASSERT_NE(it, dets.end());
            EXPECT_LE(o.score, it->score);
        }
    }
}

TEST(SoftNms, SmallSigmaMatchesHardNms) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> jitter(-0.4, 0.4), score(0.01, 1.0);
    std::uniform_int_distribution<int> cluster_count(1, 5), members(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Box> boxes;
        std::vector<double> scores;
        const int clusters = cluster_count(rng);
        for (int c = 0; c < clusters; ++c) {
            const int m = members(rng);
            for (int k = 0; k < m; ++k) {
                // 10x5 boxes jittered by < 0.4 px overlap with IoU well above 0.5;
                // clusters 100 px apart never touch.
                const double x = 100.0 * c + jitter(rng), y = jitter(rng);
                boxes.push_back({x, y, x + 10.0, y + 5.0});
                scores.push_back(score(rng));
            }
        }
        std::vector<Detection> dets;
        for (std::size_t i = 0; i < boxes.size(); ++i) dets.push_back({box_polygon(boxes[i]), scores[i], i});
        const auto expected = hard_nms(boxes, scores, 0.5);
        const auto out = soft_nms(dets, 1e-6, 0.001);
        ASSERT_EQ(out.size(), expected.size()) << trial;
        for (std::size_t i = 0; i < out.size(); ++i) {
            EXPECT_EQ(out[i].level, expected[i]);
            EXPECT_EQ(out[i].score, scores[expected[i]]);
        }
    }
}

TEST(ThresholdDetections, Examples) {
    const Polygon p = box_polygon({0, 0, 1, 1});
    const auto out = threshold_detections({{p, 0.96, 0}, {p, 0.5, 1}}, 0.95);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].score, 0.96);
    EXPECT_TRUE(threshold_detections({}, 0.95).empty());
    const auto all = threshold_detections({{p, 0.2, 0}, {p, 0.1, 1}}, 0.0);
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[1].level, 1u);
    EXPECT_TRUE(threshold_detections({{p, 0.95, 0}}, 0.95).empty());
}

TEST(Postprocess, DecodeThresholdSuppressResample) {
    const GeometricEncoding a{ShapeVector({1.0}), 20.0, {50, 50}};
    const GeometricEncoding b{ShapeVector({1.0}), 20.0, {51, 50}};
    const GeometricEncoding c{ShapeVector({1.0}), 10.0, {200, 200}};
    PostprocessOptions opt;
    opt.min_score = 0.9;
    const auto out = postprocess({{a, 0.97, 0}, {b, 0.96, 1}, {c, 0.99, 2}, {c, 0.5, 2}}, opt);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].score, 0.99);
    EXPECT_EQ(out[1].score, 0.97);
    EXPECT_LT(out[2].score, 0.96 * 0.2);
    for (const auto& d : out) EXPECT_EQ(d.polygon.size(), 36u);

    opt.output_points = 0;
    const auto raw = postprocess({{c, 0.99, 0}}, opt);
    EXPECT_EQ(raw[0].polygon.size(), 360u);
}

}  // namespace
}  // namespace textray
