#include "textray/cli.hpp"

#include "textray/dataset_io.hpp"
#include "textray/errors.hpp"
#include "textray/evaluation.hpp"
#include "textray/postprocess.hpp"
#include "textray/synthetic.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace textray::cli {

namespace {

using Json = nlohmann::ordered_json;

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Maps library errors onto exit statuses.
template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        log << "parse error: " << e.what();
        if (e.byte_offset() > 0) log << " (byte " << e.byte_offset() << ")";
        log << "\n";
        return kParseFailure;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kValidationFailure;
    }
}

struct InstanceRef {
    const AnnotatedImage* image;
    std::size_t index;
};

std::vector<InstanceRef> flatten(const std::vector<AnnotatedImage>& images) {
    std::vector<InstanceRef> refs;
    for (const auto& img : images) {
        for (std::size_t k = 0; k < img.instances.size(); ++k) refs.push_back({&img, k});
    }
    return refs;
}

Corpus load_checked(const RunConfig& config, std::ostream& log) {
    if (config.corpus.empty()) throw std::invalid_argument("--corpus is required");
    Corpus corpus = load_corpus(config.corpus, LoadOptions{config.lenient});
    for (const auto& w : corpus.warnings) log << "warning: " << w << "\n";
    return corpus;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

void validate_config(const RunConfig& config) {
    if (config.n_rays < 4) throw std::invalid_argument("--rays must be at least 4");
    if (config.degree < 0) throw std::invalid_argument("--degree must be non-negative");
    if (static_cast<std::size_t>(config.degree) + 1 > config.n_rays) {
        throw std::invalid_argument("--degree must be below --rays");
    }
    for (int k : config.degrees) {
        if (k < 0 || static_cast<std::size_t>(k) + 1 > config.n_rays) {
            throw std::invalid_argument("--degrees entries must be in [0, rays)");
        }
    }
    if (!(config.neg_thresh >= 0.0 && config.neg_thresh <= config.pos_thresh && config.pos_thresh <= 1.0)) {
        throw std::invalid_argument("need 0 <= --neg-thresh <= --pos-thresh <= 1");
    }
    if (!(config.score_thresh >= 0.0 && config.score_thresh <= 1.0)) {
        throw std::invalid_argument("--score-thresh must be in [0, 1]");
    }
    if (!(config.iou_thresh > 0.0 && config.iou_thresh < 1.0)) {
        throw std::invalid_argument("--iou-thresh must be in (0, 1)");
    }
    if (!(config.sigma > 0.0)) throw std::invalid_argument("--sigma must be positive");
    if (config.levels.empty()) throw std::invalid_argument("--levels must not be empty");
    for (const auto& [lo, hi] : config.levels) {
        if (!(lo <= hi)) throw std::invalid_argument("--levels ranges need lo <= hi");
    }
    if (!(config.stride > 0.0)) throw std::invalid_argument("--stride must be positive");
}

std::vector<int> parse_degree_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int k = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad degree '" + item + "'");
        out.push_back(k);
    }
    if (out.empty()) throw std::invalid_argument("empty degree list");
    return out;
}

std::vector<LevelRange> parse_level_list(const std::string& text) {
    std::vector<LevelRange> out;
    std::stringstream ss(text);
    std::string item;
    auto bound = [](const std::string& s) {
        if (s == "inf") return std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad level bound '" + s + "'");
        return v;
    };
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("level range needs lo:hi, got '" + item + "'");
        out.emplace_back(bound(item.substr(0, colon)), bound(item.substr(colon + 1)));
    }
    return out;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
    workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

int cmd_encode(const RunConfig& config, std::ostream& log, EncodeSummary* summary) {
    return guarded(log, [&] {
        validate_config(config);
        const Corpus corpus = load_checked(config, log);
        const auto refs = flatten(corpus.images);

        std::vector<std::optional<EncodingRecord>> slots(refs.size());
        std::vector<std::string> failures(refs.size());
        parallel_for(refs.size(), config.workers, [&](std::size_t i) {
            const auto& inst = refs[i].image->instances[refs[i].index];
            try {
                EncodingRecord rec;
                rec.image_id = refs[i].image->id;
                rec.instance = refs[i].index;
                rec.encoding = encode(inst.polygon, inst.pairing(), config.n_rays, config.degree);
                rec.fidelity = reconstruction_fidelity(inst.polygon, rec.encoding, config.n_rays);
                slots[i] = std::move(rec);
            } catch (const Error& e) {
                failures[i] = e.what();
                if (!config.lenient) throw;
            }
        });

        std::vector<EncodingRecord> records;
        std::vector<double> ious;
        double err_sum = 0.0;
        EncodeSummary s;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (!slots[i]) {
                log << "warning: image " << refs[i].image->id << " instance " << refs[i].index
                    << " not encoded: " << failures[i] << "\n";
                continue;
            }
            ious.push_back(slots[i]->fidelity.iou);
            err_sum += slots[i]->fidelity.mean_radial_error;
            if (slots[i]->fidelity.iou < kLowFidelityIou) {
                ++s.low_fidelity;
                log << "low-fidelity: image " << slots[i]->image_id << " instance " << slots[i]->instance
                    << " iou " << slots[i]->fidelity.iou << "\n";
            }
            records.push_back(std::move(*slots[i]));
        }
        s.instances = records.size();
        if (!ious.empty()) {
            s.mean_iou = std::accumulate(ious.begin(), ious.end(), 0.0) / static_cast<double>(ious.size());
            s.median_iou = median(ious);
            s.mean_radial_error = err_sum / static_cast<double>(ious.size());
        }
        if (!config.out.empty()) save_encodings(config.out, records);
        log << "encoded " << s.instances << " instances (rays " << config.n_rays << ", degree " << config.degree
            << "): mean IoU " << s.mean_iou << ", median IoU " << s.median_iou << ", mean radial error "
            << s.mean_radial_error << ", low-fidelity " << s.low_fidelity << "\n";
        if (summary) *summary = s;
        return kSuccess;
    });
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate_config(config);
        if (config.degrees.empty()) throw std::invalid_argument("--degrees is required for sweep");
        std::vector<int> degrees = config.degrees;
        std::sort(degrees.begin(), degrees.end());
        degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());

        const Corpus corpus = load_checked(config, log);
        const auto refs = flatten(corpus.images);

        // Centers and profiles are shared by every degree.
        struct Row {
            std::vector<double> iou;
            std::vector<double> err;
            bool ok = false;
        };
        std::vector<Row> per_instance(refs.size());
        parallel_for(refs.size(), config.workers, [&](std::size_t i) {
            const auto& inst = refs[i].image->instances[refs[i].index];
            try {
                const Point2 center = text_center(inst.polygon, inst.pairing());
                const RadialProfile profile = sample_radial_profile(inst.polygon, center, config.n_rays);
                Row row;
                for (int k : degrees) {
                    auto [shape, scale] = chebyshev_fit(profile, k);
                    const GeometricEncoding enc{std::move(shape), scale, center};
                    row.err.push_back(mean_radial_error(profile, enc));
                    double iou = 0.0;
                    try {
                        iou = polygon_iou(inst.polygon, decode(enc, config.n_rays));
                    } catch (const InvalidPolygon&) {
                    }
                    row.iou.push_back(iou);
                }
                row.ok = true;
                per_instance[i] = std::move(row);
            } catch (const Error&) {
                if (!config.lenient) throw;
            }
        });

        std::vector<SweepRow> rows;
        for (std::size_t d = 0; d < degrees.size(); ++d) {
            SweepRow row;
            row.degree = degrees[d];
            for (const auto& r : per_instance) {
                if (!r.ok) continue;
                row.mean_iou += r.iou[d];
                row.mean_radial_error += r.err[d];
                ++row.instances;
            }
            if (row.instances) {
                row.mean_iou /= static_cast<double>(row.instances);
                row.mean_radial_error /= static_cast<double>(row.instances);
            }
            rows.push_back(row);
        }
        if (!config.out.empty()) write_file(config.out, write_sweep(rows));
        log << "degree  mean_iou  mean_radial_error  instances\n";
        for (const auto& r : rows) {
            log << r.degree << "  " << r.mean_iou << "  " << r.mean_radial_error << "  " << r.instances << "\n";
        }
        return kSuccess;
    });
}

int cmd_eval(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate_config(config);
        if (config.detections.empty()) throw std::invalid_argument("--detections is required for eval");
        const Corpus gt = load_checked(config, log);
        const auto dets = load_detections(config.detections);

        std::map<std::string, const ImageDetections*> by_id;
        for (const auto& d : dets) {
            if (!by_id.emplace(d.id, &d).second) throw MisalignedInputs("duplicate detection image id " + d.id);
        }
        std::size_t used = 0;
        std::vector<EvalReport> reports;
        for (const auto& img : gt.images) {
            std::vector<Polygon> polys;
            std::vector<bool> ignore;
            for (const auto& inst : img.instances) {
                polys.push_back(inst.polygon);
                ignore.push_back(inst.ignore);
            }
            const auto it = by_id.find(img.id);
            static const std::vector<Detection> none;
            const auto& image_dets = it == by_id.end() ? none : it->second->detections;
            used += it != by_id.end();
            reports.push_back(evaluate(image_dets, polys, ignore, config.iou_thresh));
        }
        if (used != by_id.size()) throw MisalignedInputs("detections reference images missing from the corpus");

        const EvalReport report = config.per_image ? average_reports(reports) : pool_reports(reports);
        if (!config.out.empty()) write_file(config.out, write_report(report, reports.size()));
        log << (config.per_image ? "per-image mean" : "pooled") << " over " << reports.size()
            << " images: precision " << report.precision << ", recall " << report.recall << ", f-measure "
            << report.f_measure << " (tp " << report.counts.tp << ", fp " << report.counts.fp << ", fn "
            << report.counts.fn << ", ignored " << report.counts.ignored_hits << ")\n";
        return kSuccess;
    });
}

int cmd_gradcheck(const RunConfig& config, std::ostream& log, GradcheckSummary* summary) {
    return guarded(log, [&] {
        validate_config(config);
        if (config.degree < 1) throw std::invalid_argument("gradcheck needs --degree >= 1");
        constexpr double h = 1e-6;
        constexpr double rel_tol = 1e-5;
        constexpr double abs_tol = 1e-8;
        constexpr double near_zero = 1e-3;

        std::mt19937_64 rng(config.seed);
        std::uniform_int_distribution<int> degree_dist(1, config.degree);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);

        GradcheckSummary s;
        bool ok = true;
        for (std::size_t pair = 0; pair < config.pairs; ++pair) {
            const int k = pair == 0 ? config.degree : degree_dist(rng);
            std::vector<double> target(static_cast<std::size_t>(k) + 1), pred(target.size());
            for (std::size_t j = 0; j < target.size(); ++j) {
                target[j] = unit(rng) / static_cast<double>(j + 1);
                pred[j] = target[j] + 0.6 * unit(rng);
            }
            const ShapeVector t(target);
            auto grad = content_loss_grad(ShapeVector(pred), t, config.n_rays);
            if (config.inject_sign_error) {
                for (double& g : grad) g = -g;
            }
            for (std::size_t j = 0; j < pred.size(); ++j) {
                auto plus = pred, minus = pred;
                plus[j] += h;
                minus[j] -= h;
                const double fd = (content_loss(ShapeVector(plus), t, config.n_rays) -
                                   content_loss(ShapeVector(minus), t, config.n_rays)) /
                                  (2.0 * h);
                const double diff = std::abs(grad[j] - fd);
                const double mag = std::max(std::abs(grad[j]), std::abs(fd));
                if (mag < near_zero) {
                    ok = ok && diff < abs_tol;
                } else {
                    s.max_relative_error = std::max(s.max_relative_error, diff / mag);
                    ok = ok && diff / mag < rel_tol;
                }
            }
            ++s.pairs;
        }
        s.passed = ok;
        if (!config.out.empty()) {
            Json doc;
            doc["pairs"] = s.pairs;
            doc["max_degree"] = config.degree;
            doc["seed"] = config.seed;
            doc["max_relative_error"] = s.max_relative_error;
            doc["passed"] = s.passed;
            write_file(config.out, doc.dump(1) + "\n");
        }
        log << "gradcheck " << (s.passed ? "PASS" : "FAIL") << ": " << s.pairs << " pairs, max degree "
            << config.degree << ", max relative error " << s.max_relative_error << "\n";
        if (summary) *summary = s;
        return s.passed ? kSuccess : kValidationFailure;
    });
}

int cmd_synth(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate_config(config);
        if (config.out.empty()) throw std::invalid_argument("--out is required for synth");
        const auto images = config.spiral ? synthetic::make_spiral_corpus()
                                          : synthetic::make_corpus({config.instances, 1.0, 15.0, config.seed});
        save_corpus(config.out, images);
        log << "wrote " << images.size() << " images to " << config.out.string() << "\n";
        return kSuccess;
    });
}

int cmd_postprocess(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate_config(config);
        if (config.predictions.empty()) throw std::invalid_argument("--predictions is required for postprocess");
        const auto images = load_predictions(config.predictions);
        PostprocessOptions options;
        options.n_rays = config.n_rays;
        options.min_score = config.score_thresh;
        options.sigma = config.sigma;

        std::vector<ImageDetections> out(images.size());
        parallel_for(images.size(), config.workers, [&](std::size_t i) {
            out[i].id = images[i].id;
            out[i].detections = postprocess(images[i].predictions, options);
        });
        std::size_t total = 0;
        for (const auto& img : out) total += img.detections.size();
        if (!config.out.empty()) save_detections(config.out, out);
        log << "kept " << total << " detections over " << out.size() << " images\n";
        return kSuccess;
    });
}

int cmd_targets(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate_config(config);
        const Corpus corpus = load_checked(config, log);
        const LabelThresholds thresholds{config.neg_thresh, config.pos_thresh};

        std::vector<Json> slots(corpus.images.size());
        parallel_for(corpus.images.size(), config.workers, [&](std::size_t i) {
            const auto& img = corpus.images[i];
            std::vector<GeometricEncoding> encodings;
            Json instances = Json::array();
            std::vector<std::size_t> level_counts(config.levels.size(), 0);
            for (const auto& inst : img.instances) {
                encodings.push_back(encode(inst.polygon, inst.pairing(), config.n_rays, config.degree));
                const double rel = relative_size(encodings.back().scale, img.width, img.height);
                Json j;
                j["scale"] = encodings.back().scale;
                j["relative_size"] = rel;
                Json levels = Json::array();
                for (std::size_t l : assign_levels(rel, config.levels)) {
                    levels.push_back(l);
                    ++level_counts[l];
                }
                j["levels"] = std::move(levels);
                instances.push_back(std::move(j));
            }
            std::size_t positive = 0, negative = 0, ignored = 0;
            std::vector<double> weights;
            for (double y = config.stride / 2.0; y < img.height; y += config.stride) {
                for (double x = config.stride / 2.0; x < img.width; x += config.stride) {
                    // A point inside overlapping instances follows the one
                    // whose center it is closest to in normalized distance.
                    double w = 0.0;
                    bool inside = false;
                    for (std::size_t k = 0; k < img.instances.size(); ++k) {
                        if (img.instances[k].ignore) continue;
                        if (point_in_polygon(img.instances[k].polygon, {x, y}) == Location::outside) continue;
                        inside = true;
                        w = std::max(w, central_weight({x, y}, encodings[k]));
                    }
                    switch (classify_point(w, thresholds, inside)) {
                        case PointLabel::positive:
                            ++positive;
                            weights.push_back(w);
                            break;
                        case PointLabel::negative:
                            ++negative;
                            break;
                        case PointLabel::ignored:
                            ++ignored;
                            break;
                    }
                }
            }
            Json doc;
            doc["id"] = img.id;
            doc["positive"] = positive;
            doc["ignored"] = ignored;
            doc["negative"] = negative;
            doc["positive_weight_sum"] = std::accumulate(weights.begin(), weights.end(), 0.0);
            doc["level_counts"] = level_counts;
            doc["instances"] = std::move(instances);
            slots[i] = std::move(doc);
        });
        Json doc;
        doc["images"] = Json::array();
        std::size_t positive = 0, ignored = 0, negative = 0;
        for (auto& s : slots) {
            positive += s["positive"].get<std::size_t>();
            ignored += s["ignored"].get<std::size_t>();
            negative += s["negative"].get<std::size_t>();
            doc["images"].push_back(std::move(s));
        }
        if (!config.out.empty()) write_file(config.out, doc.dump(1) + "\n");
        log << "points at stride " << config.stride << ": positive " << positive << ", ignored " << ignored
            << ", negative " << negative << "\n";
        return kSuccess;
    });
}

}  // namespace textray::cli
