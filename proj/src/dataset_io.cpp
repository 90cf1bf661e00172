#include "textray/dataset_io.hpp"

#include "textray/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace textray {

namespace {

using Json = nlohmann::ordered_json;

Json parse_document(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
}

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
    throw ParseError(field + ": " + what, 0, field);
}

const Json& member(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(path + "." + key, "missing field");
    return *it;
}

const Json& array_member(const Json& obj, const char* key, const std::string& path) {
    const Json& v = member(obj, key, path);
    if (!v.is_array()) schema_error(path + "." + key, "expected an array");
    return v;
}

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema_error(path, "non-finite number");
    return d;
}

double number_member(const Json& obj, const char* key, const std::string& path) {
    return number(member(obj, key, path), path + "." + key);
}

std::size_t count_member(const Json& obj, const char* key, const std::string& path) {
    const Json& v = member(obj, key, path);
    if (!v.is_number_unsigned()) schema_error(path + "." + key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::string string_member(const Json& obj, const char* key, const std::string& path) {
    const Json& v = member(obj, key, path);
    if (!v.is_string()) schema_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const Json& arr, const std::string& path) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(number(arr[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Point2> points_from_flat(const Json& arr, const std::string& path) {
    const auto flat = numbers(arr, path);
    if (flat.size() % 2 != 0) schema_error(path, "odd number of coordinates");
    std::vector<Point2> pts(flat.size() / 2);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {flat[2 * i], flat[2 * i + 1]};
    return pts;
}

Json flat_points(const Polygon& polygon) {
    Json arr = Json::array();
    for (const auto& v : polygon.vertices()) {
        arr.push_back(v.x);
        arr.push_back(v.y);
    }
    return arr;
}

Json coeff_array(const ShapeVector& shape) {
    Json arr = Json::array();
    for (double c : shape.coeffs()) arr.push_back(c);
    return arr;
}

GeometricEncoding encoding_from(const Json& obj, const std::string& path) {
    const Json& center = array_member(obj, "center", path);
    if (center.size() != 2) schema_error(path + ".center", "expected [x, y]");
    GeometricEncoding enc;
    enc.center = {number(center[0], path + ".center[0]"), number(center[1], path + ".center[1]")};
    enc.scale = number_member(obj, "scale", path);
    if (!(enc.scale > 0.0)) schema_error(path + ".scale", "scale must be positive");
    const auto coeffs = numbers(array_member(obj, "coeffs", path), path + ".coeffs");
    if (coeffs.empty()) schema_error(path + ".coeffs", "empty coefficient list");
    enc.shape = ShapeVector(coeffs);
    return enc;
}

std::string dump(const Json& doc) { return doc.dump(1) + "\n"; }

}  // namespace

std::optional<PairedPolyline> Instance::pairing() const {
    if (!pairing_split) return std::nullopt;
    return pairing_from_split(polygon, *pairing_split);
}

PairedPolyline pairing_from_split(const Polygon& polygon, std::size_t split) {
    const std::size_t n = polygon.size();
    if (split < 2 || 2 * split != n) {
        throw InvalidPolygon("pairing split " + std::to_string(split) + " does not halve " + std::to_string(n) +
                             " vertices");
    }
    PairedPolyline out;
    const auto& v = polygon.vertices();
    out.top.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(split));
    out.bottom.assign(v.rbegin(), v.rbegin() + static_cast<std::ptrdiff_t>(n - split));
    return out;
}

Corpus parse_corpus(std::string_view text, const LoadOptions& options) {
    const Json doc = parse_document(text);
    Corpus corpus;
    const Json& images = array_member(doc, "images", "$");
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string ipath = "$.images[" + std::to_string(i) + "]";
        const Json& img = images[i];
        AnnotatedImage image;
        image.id = string_member(img, "id", ipath);
        image.width = number_member(img, "width", ipath);
        image.height = number_member(img, "height", ipath);
        if (!(image.width > 0.0 && image.height > 0.0)) schema_error(ipath, "width and height must be positive");
        const Json& instances = array_member(img, "instances", ipath);
        for (std::size_t k = 0; k < instances.size(); ++k) {
            const std::string kpath = ipath + ".instances[" + std::to_string(k) + "]";
            const Json& inst = instances[k];
            auto pts = points_from_flat(array_member(inst, "points", kpath), kpath + ".points");
            bool clamped = false;
            for (auto& p : pts) {
                const Point2 c{std::clamp(p.x, 0.0, image.width), std::clamp(p.y, 0.0, image.height)};
                clamped = clamped || !(c == p);
                p = c;
            }
            if (clamped) {
                corpus.warnings.push_back("image " + image.id + " instance " + std::to_string(k) +
                                          ": coordinates clamped to the image bounds");
            }
            Instance instance{Polygon{}, std::nullopt, false};
            if (inst.contains("ignore")) {
                if (!inst["ignore"].is_boolean()) schema_error(kpath + ".ignore", "expected a boolean");
                instance.ignore = inst["ignore"].get<bool>();
            }
            if (inst.contains("pairing_split") && !inst["pairing_split"].is_null()) {
                instance.pairing_split = count_member(inst, "pairing_split", kpath);
            }
            try {
                instance.polygon = Polygon(std::move(pts));
                validate(instance.polygon);
                if (instance.pairing_split) pairing_from_split(instance.polygon, *instance.pairing_split);
            } catch (const InvalidPolygon& e) {
                const std::string msg = "image " + image.id + " instance " + std::to_string(k) + ": " + e.what();
                if (!options.lenient) throw InvalidPolygon(msg);
                corpus.warnings.push_back(msg + " (skipped)");
                continue;
            }
            image.instances.push_back(std::move(instance));
        }
        corpus.images.push_back(std::move(image));
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    return parse_corpus(read_file(path), options);
}

std::string write_corpus(const std::vector<AnnotatedImage>& images) {
    Json doc;
    Json arr = Json::array();
    for (const auto& image : images) {
        Json img;
        img["id"] = image.id;
        img["width"] = image.width;
        img["height"] = image.height;
        Json instances = Json::array();
        for (const auto& inst : image.instances) {
            Json j;
            j["points"] = flat_points(inst.polygon);
            if (inst.pairing_split) j["pairing_split"] = *inst.pairing_split;
            j["ignore"] = inst.ignore;
            instances.push_back(std::move(j));
        }
        img["instances"] = std::move(instances);
        arr.push_back(std::move(img));
    }
    doc["images"] = std::move(arr);
    return dump(doc);
}

void save_corpus(const std::filesystem::path& path, const std::vector<AnnotatedImage>& images) {
    write_file(path, write_corpus(images));
}

std::vector<EncodingRecord> parse_encodings(std::string_view text) {
    const Json doc = parse_document(text);
    const Json& records = array_member(doc, "records", "$");
    std::vector<EncodingRecord> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string path = "$.records[" + std::to_string(i) + "]";
        const Json& r = records[i];
        EncodingRecord rec;
        rec.image_id = string_member(r, "image_id", path);
        rec.instance = count_member(r, "instance", path);
        rec.encoding = encoding_from(r, path);
        const std::size_t degree = count_member(r, "degree", path);
        if (degree + 1 != rec.encoding.shape.coeffs().size()) schema_error(path + ".degree", "disagrees with coeffs");
        rec.fidelity.iou = number_member(r, "iou", path);
        rec.fidelity.mean_radial_error = number_member(r, "mean_radial_error", path);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<EncodingRecord> load_encodings(const std::filesystem::path& path) { return parse_encodings(read_file(path)); }

std::string write_encodings(const std::vector<EncodingRecord>& records) {
    Json arr = Json::array();
    for (const auto& rec : records) {
        Json r;
        r["image_id"] = rec.image_id;
        r["instance"] = rec.instance;
        r["center"] = Json::array({rec.encoding.center.x, rec.encoding.center.y});
        r["scale"] = rec.encoding.scale;
        r["degree"] = rec.encoding.shape.degree();
        r["coeffs"] = coeff_array(rec.encoding.shape);
        r["iou"] = rec.fidelity.iou;
        r["mean_radial_error"] = rec.fidelity.mean_radial_error;
        r["low_fidelity"] = rec.fidelity.iou < kLowFidelityIou;
        arr.push_back(std::move(r));
    }
    Json doc;
    doc["records"] = std::move(arr);
    return dump(doc);
}

void save_encodings(const std::filesystem::path& path, const std::vector<EncodingRecord>& records) {
    write_file(path, write_encodings(records));
}

std::vector<ImageDetections> parse_detections(std::string_view text) {
    const Json doc = parse_document(text);
    const Json& images = array_member(doc, "images", "$");
    std::vector<ImageDetections> out;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string ipath = "$.images[" + std::to_string(i) + "]";
        ImageDetections image;
        image.id = string_member(images[i], "id", ipath);
        const Json& dets = array_member(images[i], "detections", ipath);
        for (std::size_t k = 0; k < dets.size(); ++k) {
            const std::string kpath = ipath + ".detections[" + std::to_string(k) + "]";
            Detection d;
            try {
                d.polygon = Polygon(points_from_flat(array_member(dets[k], "points", kpath), kpath + ".points"));
            } catch (const InvalidPolygon& e) {
                schema_error(kpath + ".points", e.what());
            }
            d.score = number_member(dets[k], "score", kpath);
            if (d.score < 0.0 || d.score > 1.0) schema_error(kpath + ".score", "score outside [0, 1]");
            d.level = dets[k].contains("level") ? count_member(dets[k], "level", kpath) : 0;
            image.detections.push_back(std::move(d));
        }
        out.push_back(std::move(image));
    }
    return out;
}

std::vector<ImageDetections> load_detections(const std::filesystem::path& path) {
    return parse_detections(read_file(path));
}

std::string write_detections(const std::vector<ImageDetections>& images) {
    Json arr = Json::array();
    for (const auto& image : images) {
        Json img;
        img["id"] = image.id;
        Json dets = Json::array();
        for (const auto& d : image.detections) {
            Json j;
            j["points"] = flat_points(d.polygon);
            j["score"] = d.score;
            j["level"] = d.level;
            dets.push_back(std::move(j));
        }
        img["detections"] = std::move(dets);
        arr.push_back(std::move(img));
    }
    Json doc;
    doc["images"] = std::move(arr);
    return dump(doc);
}

void save_detections(const std::filesystem::path& path, const std::vector<ImageDetections>& images) {
    write_file(path, write_detections(images));
}

std::vector<ImagePredictions> parse_predictions(std::string_view text) {
    const Json doc = parse_document(text);
    const Json& images = array_member(doc, "images", "$");
    std::vector<ImagePredictions> out;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string ipath = "$.images[" + std::to_string(i) + "]";
        ImagePredictions image;
        image.id = string_member(images[i], "id", ipath);
        const Json& preds = array_member(images[i], "predictions", ipath);
        for (std::size_t k = 0; k < preds.size(); ++k) {
            const std::string kpath = ipath + ".predictions[" + std::to_string(k) + "]";
            ScoredEncoding p;
            p.encoding = encoding_from(preds[k], kpath);
            p.score = number_member(preds[k], "score", kpath);
            if (p.score < 0.0 || p.score > 1.0) schema_error(kpath + ".score", "score outside [0, 1]");
            p.level = preds[k].contains("level") ? count_member(preds[k], "level", kpath) : 0;
            image.predictions.push_back(std::move(p));
        }
        out.push_back(std::move(image));
    }
    return out;
}

std::vector<ImagePredictions> load_predictions(const std::filesystem::path& path) {
    return parse_predictions(read_file(path));
}

std::string write_predictions(const std::vector<ImagePredictions>& images) {
    Json arr = Json::array();
    for (const auto& image : images) {
        Json img;
        img["id"] = image.id;
        Json preds = Json::array();
        for (const auto& p : image.predictions) {
            Json j;
            j["center"] = Json::array({p.encoding.center.x, p.encoding.center.y});
            j["scale"] = p.encoding.scale;
            j["coeffs"] = coeff_array(p.encoding.shape);
            j["score"] = p.score;
            j["level"] = p.level;
            preds.push_back(std::move(j));
        }
        img["predictions"] = std::move(preds);
        arr.push_back(std::move(img));
    }
    Json doc;
    doc["images"] = std::move(arr);
    return dump(doc);
}

std::string write_sweep(const std::vector<SweepRow>& rows) {
    Json arr = Json::array();
    for (const auto& row : rows) {
        Json r;
        r["degree"] = row.degree;
        r["mean_iou"] = row.mean_iou;
        r["mean_radial_error"] = row.mean_radial_error;
        r["instances"] = row.instances;
        arr.push_back(std::move(r));
    }
    Json doc;
    doc["rows"] = std::move(arr);
    return dump(doc);
}

std::string write_report(const EvalReport& report, std::size_t images) {
    Json doc;
    doc["images"] = images;
    doc["precision"] = report.precision;
    doc["recall"] = report.recall;
    doc["f_measure"] = report.f_measure;
    doc["tp"] = report.counts.tp;
    doc["fp"] = report.counts.fp;
    doc["fn"] = report.counts.fn;
    doc["ignored_hits"] = report.counts.ignored_hits;
    return dump(doc);
}

Polygon interpolate_vertices(const Polygon& polygon, std::size_t target) {
    const std::size_t n = polygon.size();
    if (target < n) {
        throw TargetTooSmall("cannot interpolate " + std::to_string(n) + " vertices down to " + std::to_string(target));
    }
    std::vector<double> length(n);
    for (std::size_t i = 0; i < n; ++i) length[i] = norm(polygon.edge_end(i) - polygon.edge_start(i));
    std::vector<std::size_t> extra(n, 0);
    for (std::size_t added = n; added < target; ++added) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (length[i] / static_cast<double>(extra[i] + 1) > length[best] / static_cast<double>(extra[best] + 1)) {
                best = i;
            }
        }
        ++extra[best];
    }
    std::vector<Point2> out;
    out.reserve(target);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = polygon.edge_start(i);
        const Point2 b = polygon.edge_end(i);
        out.push_back(a);
        const double pieces = static_cast<double>(extra[i] + 1);
        for (std::size_t k = 1; k <= extra[i]; ++k) out.push_back(a + (static_cast<double>(k) / pieces) * (b - a));
    }
    return Polygon(std::move(out));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace textray
