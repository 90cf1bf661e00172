#include "textray/dataset_io.hpp"
#include "textray/errors.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>

namespace textray {
namespace {

const char* kMinimal = R"({"images": [{"id": "img0", "width": 100, "height": 50,
  "instances": [{"points": [10, 10, 20, 10, 20, 20, 10, 20], "ignore": false}]}]})";

TEST(LoadCorpus, Minimal) {
    const auto corpus = parse_corpus(kMinimal);
    ASSERT_EQ(corpus.images.size(), 1u);
    const auto& img = corpus.images[0];
    EXPECT_EQ(img.id, "img0");
    EXPECT_EQ(img.width, 100.0);
    EXPECT_EQ(img.height, 50.0);
    ASSERT_EQ(img.instances.size(), 1u);
    EXPECT_EQ(img.instances[0].polygon.size(), 4u);
    EXPECT_FALSE(img.instances[0].pairing_split.has_value());
    EXPECT_FALSE(img.instances[0].ignore);
    EXPECT_TRUE(corpus.warnings.empty());
}

TEST(LoadCorpus, BowtieNamesInstance) {
    const char* text = R"({"images": [{"id": "page7", "width": 100, "height": 100, "instances": [
      {"points": [0, 0, 10, 0, 10, 10, 0, 10]},
      {"points": [0, 0, 10, 10, 10, 0, 0, 10]}]}]})";
    try {
        parse_corpus(text);
        FAIL() << "expected InvalidPolygon";
    } catch (const InvalidPolygon& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("page7"), std::string::npos) << what;
        EXPECT_NE(what.find("1"), std::string::npos) << what;
    }
    const auto lenient = parse_corpus(text, {true});
    EXPECT_EQ(lenient.images[0].instances.size(), 1u);
    EXPECT_EQ(lenient.warnings.size(), 1u);
}

TEST(LoadCorpus, FourteenPointPairing) {
    // Seven top vertices left to right, seven bottom vertices right to left.
    std::string pts;
    for (int i = 0; i < 7; ++i) pts += std::to_string(10 + 10 * i) + ", 20, ";
    for (int i = 6; i >= 0; --i) pts += std::to_string(10 + 10 * i) + ", 40" + (i ? ", " : "");
    const std::string text = R"({"images": [{"id": "a", "width": 200, "height": 100, "instances": [{"points": [)" + pts +
                             R"(], "pairing_split": 7}]}]})";
    const auto corpus = parse_corpus(text);
    const auto& inst = corpus.images[0].instances[0];
    ASSERT_EQ(inst.polygon.size(), 14u);
    const auto pairing = inst.pairing();
    ASSERT_TRUE(pairing.has_value());
    ASSERT_EQ(pairing->top.size(), 7u);
    ASSERT_EQ(pairing->bottom.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_EQ(pairing->top[i].x, pairing->bottom[i].x);
        EXPECT_EQ(pairing->top[i].y, 20.0);
        EXPECT_EQ(pairing->bottom[i].y, 40.0);
    }
    const std::string bad = R"({"images": [{"id": "a", "width": 200, "height": 100, "instances": [{"points": [)" + pts +
                            R"(], "pairing_split": 5}]}]})";
    EXPECT_ANY_THROW(parse_corpus(bad));
}

TEST(LoadCorpus, ClampsWithWarning) {
    const char* text = R"({"images": [{"id": "edge", "width": 20, "height": 20,
      "instances": [{"points": [-1.5, 0, 20, 0, 21, 20, 0, 20]}]}]})";
    const auto corpus = parse_corpus(text);
    const auto& poly = corpus.images[0].instances[0].polygon;
    EXPECT_EQ(poly[0].x, 0.0);
    EXPECT_EQ(poly[2].x, 20.0);
    ASSERT_FALSE(corpus.warnings.empty());
    EXPECT_NE(corpus.warnings[0].find("edge"), std::string::npos);
}

TEST(LoadCorpus, SchemaErrors) {
    EXPECT_THROW(parse_corpus(R"({"images": [{"id": "x", "width": 10}]})"), ParseError);
    EXPECT_THROW(parse_corpus(R"({"images": [{"id": "x", "width": 10, "height": 10, "instances": [{"points": [1, 2, 3]}]}]})"),
                 ParseError);
    EXPECT_THROW(parse_corpus(R"({"images": [{"id": "x", "width": -1, "height": 10, "instances": []}]})"), ParseError);
    try {
        parse_corpus(R"({"images": [{"id": 5, "width": 10, "height": 10, "instances": []}]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(e.field().find("id"), std::string::npos) << e.field();
    }
}

TEST(CorpusRoundTrip, Identity) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<AnnotatedImage> images;
    for (int i = 0; i < 10; ++i) {
        AnnotatedImage img{"im" + std::to_string(i), 640.0, 480.0, {}};
        for (int j = 0; j < 3; ++j) {
            const double x = 50 + 400 * u(rng), y = 50 + 300 * u(rng), w = 1 + 40 * u(rng), h = 1 + 40 * u(rng);
            Instance inst{Polygon({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}), std::nullopt, j == 2};
            if (j == 1) inst.pairing_split = 2;
            img.instances.push_back(inst);
        }
        images.push_back(img);
    }
    const auto back = parse_corpus(write_corpus(images));
    EXPECT_EQ(back.images, images);
}

EncodingRecord random_record(std::mt19937_64& rng, std::size_t i) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> deg(0, 66);
    std::vector<double> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& x : c) x = u(rng) / 3.0;
    return {"image_" + std::to_string(i / 3), i % 3,
            GeometricEncoding{ShapeVector(c), 1.0 + 500.0 * std::abs(u(rng)), {1000.0 * u(rng), 1000.0 * u(rng)}},
            Fidelity{std::abs(u(rng)), std::abs(u(rng)) * 1e-3}};
}

TEST(Encodings, RoundTripHundredRecords) {
    std::mt19937_64 rng(100);
    std::vector<EncodingRecord> records;
    for (std::size_t i = 0; i < 100; ++i) records.push_back(random_record(rng, i));
    const auto back = parse_encodings(write_encodings(records));
    ASSERT_EQ(back.size(), records.size());
    for (std::size_t i = 0; i < records.size(); ++i) EXPECT_EQ(back[i], records[i]) << i;

    const auto dir = std::filesystem::temp_directory_path() / "textray_io_test";
    std::filesystem::create_directories(dir);
    save_encodings(dir / "enc.json", records);
    EXPECT_EQ(load_encodings(dir / "enc.json"), records);
    std::filesystem::remove_all(dir);
}

TEST(Encodings, EmptyList) {
    const std::string text = write_encodings({});
    EXPECT_TRUE(parse_encodings(text).empty());
    EXPECT_NE(text.find("records"), std::string::npos);
}

TEST(Encodings, TruncatedFileReportsByteOffset) {
    std::mt19937_64 rng(1);
    const std::string text = write_encodings({random_record(rng, 0), random_record(rng, 1)});
    const std::string truncated = text.substr(0, text.size() / 2);
    try {
        parse_encodings(truncated);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_GT(e.byte_offset(), 0u);
        EXPECT_LE(e.byte_offset(), truncated.size() + 1);
    }
}

TEST(Detections, RoundTrip) {
    const std::vector<ImageDetections> dets{
        {"a", {{Polygon({{0, 0}, {1.25, 0}, {1, 1}}), 0.975, 2}, {Polygon({{5, 5}, {6, 5}, {6, 6}}), 0.5, 0}}},
        {"b", {}}};
    const auto back = parse_detections(write_detections(dets));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].id, "a");
    ASSERT_EQ(back[0].detections.size(), 2u);
    EXPECT_EQ(back[0].detections[0].polygon, dets[0].detections[0].polygon);
    EXPECT_EQ(back[0].detections[0].score, 0.975);
    EXPECT_EQ(back[0].detections[0].level, 2u);
    EXPECT_TRUE(back[1].detections.empty());
    EXPECT_THROW(parse_detections(R"({"images": [{"id": "a", "detections": [{"points": [0,0,1,0,1,1], "score": 1.5}]}]})"),
                 ParseError);
}

TEST(Predictions, RoundTrip) {
    const std::vector<ImagePredictions> preds{
        {"p", {{GeometricEncoding{ShapeVector({1.0, 0.1}), 12.5, {3, 4}}, 0.99, 1}}}};
    const auto back = parse_predictions(write_predictions(preds));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].predictions[0].encoding, preds[0].predictions[0].encoding);
    EXPECT_EQ(back[0].predictions[0].score, 0.99);
    EXPECT_EQ(back[0].predictions[0].level, 1u);
}

TEST(InterpolateVertices, SquareToEight) {
    const Polygon sq({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    const Polygon out = interpolate_vertices(sq, 8);
    const std::vector<Point2> expected{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    EXPECT_EQ(out.vertices(), expected);
}

TEST(InterpolateVertices, TriangleToTwelve) {
    const Polygon tri({{0, 0}, {6, 0}, {0, 3}});
    const Polygon out = interpolate_vertices(tri, 12);
    ASSERT_EQ(out.size(), 12u);
    for (const auto& v : tri.vertices()) EXPECT_NE(std::find(out.vertices().begin(), out.vertices().end(), v), out.vertices().end());
    EXPECT_NEAR(perimeter(out), perimeter(tri), 1e-12 * perimeter(tri));
    for (const auto& q : out.vertices()) {
        double d = 1e300;
        for (std::size_t e = 0; e < 3; ++e) d = std::min(d, oracle::seg_dist(q, tri.edge_start(e), tri.edge_end(e)));
        EXPECT_LT(d, 1e-12);
    }
    EXPECT_EQ(out[0], tri[0]);
}

TEST(InterpolateVertices, IdentityAndErrors) {
    const Polygon p({{0, 0}, {3, 0}, {3, 1}, {1, 2}});
    EXPECT_EQ(interpolate_vertices(p, 4), p);
    EXPECT_THROW(interpolate_vertices(p, 3), TargetTooSmall);
}

TEST(InterpolateVertices, FourteenPointLabelsToTwelveAndBeyond) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Point2> v;
        for (int i = 0; i < 7; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 7.0;
            v.push_back({20.0 * u(rng) * std::cos(t), 20.0 * u(rng) * std::sin(t)});
        }
        const Polygon p(v);
        const Polygon out = interpolate_vertices(p, 30);
        ASSERT_EQ(out.size(), 30u);
        EXPECT_NEAR(perimeter(out), perimeter(p), 1e-12 * perimeter(p));
        std::size_t cursor = 0;
        for (const auto& orig : v) {
            const auto it = std::find(out.vertices().begin() + static_cast<std::ptrdiff_t>(cursor), out.vertices().end(), orig);
            ASSERT_NE(it, out.vertices().end());
            cursor = static_cast<std::size_t>(it - out.vertices().begin());
        }
    }
}

TEST(ReadFile, MissingFileThrows) { EXPECT_ANY_THROW(read_file("/nonexistent/textray/file.json")); }

}  // namespace
}  // namespace textray
