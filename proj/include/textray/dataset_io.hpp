#pragma once

#include "textray/codec.hpp"
#include "textray/evaluation.hpp"
#include "textray/geometry.hpp"
#include "textray/postprocess.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace textray {

// All interchange files are JSON documents. Reals are written in shortest
// round-trip form, so save/load is lossless.
//
// Corpus:
//   {"images": [{"id": str, "width": num, "height": num,
//                "instances": [{"points": [x0, y0, x1, y1, ...],
//                               "pairing_split": int (optional),
//                               "ignore": bool}]}]}
// `pairing_split` = m marks vertices [0, m) as the top edge and [m, n) as the
// bottom edge traversed backwards; it must equal n / 2.
//
// Encodings:
//   {"records": [{"image_id", "instance", "center": [x, y], "scale",
//                 "degree", "coeffs": [...], "iou", "mean_radial_error",
//                 "low_fidelity"}]}
//
// Detections:
//   {"images": [{"id", "detections": [{"points": [...], "score", "level"}]}]}
//
// Predictions (scored encodings awaiting decode):
//   {"images": [{"id", "predictions": [{"center": [x, y], "scale",
//                "coeffs": [...], "score", "level"}]}]}

struct Instance {
    Polygon polygon;
    std::optional<std::size_t> pairing_split;
    bool ignore = false;

    /// Top/bottom pairing derived from pairing_split, if any.
    std::optional<PairedPolyline> pairing() const;

    friend bool operator==(const Instance&, const Instance&) = default;
};

struct AnnotatedImage {
    std::string id;
    double width = 0.0;
    double height = 0.0;
    std::vector<Instance> instances;

    friend bool operator==(const AnnotatedImage&, const AnnotatedImage&) = default;
};

struct LoadOptions {
    /// Skip invalid instances instead of failing.
    bool lenient = false;
};

struct Corpus {
    std::vector<AnnotatedImage> images;
    /// Clamped coordinates and skipped instances, one line each.
    std::vector<std::string> warnings;
};

struct EncodingRecord {
    std::string image_id;
    std::size_t instance = 0;
    GeometricEncoding encoding;
    Fidelity fidelity;

    friend bool operator==(const EncodingRecord&, const EncodingRecord&) = default;
};

/// IoU below this marks an instance the polar encoding cannot represent.
inline constexpr double kLowFidelityIou = 0.5;

struct ImageDetections {
    std::string id;
    std::vector<Detection> detections;
};

struct ImagePredictions {
    std::string id;
    std::vector<ScoredEncoding> predictions;
};

struct SweepRow {
    int degree = 0;
    double mean_iou = 0.0;
    double mean_radial_error = 0.0;
    std::size_t instances = 0;
};

PairedPolyline pairing_from_split(const Polygon& polygon, std::size_t split);

Corpus parse_corpus(std::string_view text, const LoadOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
std::string write_corpus(const std::vector<AnnotatedImage>& images);
void save_corpus(const std::filesystem::path& path, const std::vector<AnnotatedImage>& images);

std::vector<EncodingRecord> parse_encodings(std::string_view text);
std::vector<EncodingRecord> load_encodings(const std::filesystem::path& path);
std::string write_encodings(const std::vector<EncodingRecord>& records);
void save_encodings(const std::filesystem::path& path, const std::vector<EncodingRecord>& records);

std::vector<ImageDetections> parse_detections(std::string_view text);
std::vector<ImageDetections> load_detections(const std::filesystem::path& path);
std::string write_detections(const std::vector<ImageDetections>& images);
void save_detections(const std::filesystem::path& path, const std::vector<ImageDetections>& images);

std::vector<ImagePredictions> parse_predictions(std::string_view text);
std::vector<ImagePredictions> load_predictions(const std::filesystem::path& path);
std::string write_predictions(const std::vector<ImagePredictions>& images);

std::string write_sweep(const std::vector<SweepRow>& rows);
std::string write_report(const EvalReport& report, std::size_t images);

/// Inserts points along the existing edges until the polygon has `target`
/// vertices, splitting the edge with the longest resulting piece first.
/// Inserted points are evenly spaced within their edge.
Polygon interpolate_vertices(const Polygon& polygon, std::size_t target);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace textray
