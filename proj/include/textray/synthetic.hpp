#pragma once

#include "textray/dataset_io.hpp"
#include "textray/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace textray::synthetic {

Polygon ellipse(Point2 center, double semi_major, double semi_minor, double rotation, std::size_t n_vertices = 64);

Polygon rounded_rectangle(Point2 center, double width, double height, double corner_radius, double rotation,
                          std::size_t arc_vertices = 8);

/// Band of constant thickness around a sine centerline, top edge first,
/// bottom edge reversed; `samples` vertices per edge.
struct Ribbon {
    Polygon polygon;
    std::size_t pairing_split;
};
Ribbon sinusoidal_ribbon(Point2 center, double length, double thickness, double amplitude, double cycles,
                         double rotation, std::size_t samples = 16);

/// Archimedean band r = inner + pitch * t / (2 pi), t in [0, turns * 2 pi].
Polygon spiral(Point2 center, double inner_radius, double pitch, double width, double turns,
               std::size_t samples_per_turn = 64);

enum class ShapeKind { ellipse, rounded_rectangle, ribbon };

struct CorpusSpec {
    std::size_t instances = 200;
    double min_aspect = 1.0;
    double max_aspect = 15.0;
    std::uint64_t seed = 0;
};

/// One instance per image, cycling ellipse / rounded rectangle / ribbon,
/// with log-uniform aspect ratios. Deterministic in the seed.
std::vector<AnnotatedImage> make_corpus(const CorpusSpec& spec);

/// Kind of instance i in make_corpus.
ShapeKind corpus_kind(std::size_t i);

/// Single-image corpus holding one strongly non-convex spiral.
std::vector<AnnotatedImage> make_spiral_corpus();

}  // namespace textray::synthetic
