#include "ngt/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace ngt {

using nlohmann::json;

void ScenarioSpec::validate() const {
    auto require = [](bool ok, const char* field, const char* message) {
        if (!ok) {
            throw SchemaError(field, message);
        }
    };
    auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    require(n_groups >= 1, "n_groups", "must be at least 1");
    require(group_size >= 1, "group_size", "must be at least 1");
    require(frames >= 1, "frames", "must be at least 1");
    require(std::isfinite(speed) && speed >= 0.0, "speed", "must be a non-negative number");
    require(std::isfinite(spread) && spread >= 0.0, "spread", "must be a non-negative number");
    require(std::isfinite(group_spacing) && group_spacing > 0.0, "group_spacing", "must be positive");
    require(occlusions_per_target >= 0, "occlusions_per_target", "must be non-negative");
    require(occlusion_length >= 1, "occlusion_length", "must be at least 1");
    require(probability(corruption), "corruption", "must lie in [0, 1]");
    require(probability(dropout), "dropout", "must lie in [0, 1]");
    require(embedding_dim >= 1, "embedding_dim", "must be at least 1");
    require(probability(embedding_jitter), "embedding_jitter", "must lie in [0, 1]");
    require(std::isfinite(box_jitter) && box_jitter >= 0.0, "box_jitter", "must be a non-negative number");
    for (const auto& w : occlusions) {
        require(w.target >= 1 && w.target <= identities(), "occlusions", "target is not a generated identity");
        require(w.first_frame >= 1 && w.first_frame <= w.last_frame && w.last_frame <= frames, "occlusions",
                "window must satisfy 1 <= first_frame <= last_frame <= frames");
    }
}

namespace {

constexpr int kBoxWidth = 40;
constexpr int kBoxHeight = 100;
constexpr int kFirstRandomWindowFrame = 6;  // leave a few frames to establish tracks

class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    // Spelled out so results do not depend on the standard library's distributions.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

    double normal() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    Vector unit_vector(int dim, bool nonnegative) {
        while (true) {
            Vector v(dim);
            for (int i = 0; i < dim; ++i) {
                v(i) = nonnegative ? std::abs(normal()) : normal();
            }
            const double n = v.norm();
            if (n > 1e-12) {
                return v / n;
            }
        }
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

// Independent streams per concern so that, e.g., adding windows leaves the
// embedding draws unchanged.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<OcclusionWindow> all_windows(const ScenarioSpec& spec, Random& rng) {
    std::vector<OcclusionWindow> windows = spec.occlusions;
    if (spec.occlusions_per_target > 0) {
        const int usable = spec.frames - kFirstRandomWindowFrame + 1;
        const int segment = usable / spec.occlusions_per_target;
        if (segment < spec.occlusion_length) {
            throw SchemaError("occlusions_per_target", "windows do not fit in the sequence");
        }
        for (int id = 1; id <= spec.identities(); ++id) {
            for (int k = 0; k < spec.occlusions_per_target; ++k) {
                const int seg_start = kFirstRandomWindowFrame + k * segment;
                const int slack = segment - spec.occlusion_length;
                const int first = seg_start + static_cast<int>(rng.index(static_cast<std::size_t>(slack) + 1));
                windows.push_back({id, first, first + spec.occlusion_length - 1});
            }
        }
    }
    std::sort(windows.begin(), windows.end(), [](const OcclusionWindow& a, const OcclusionWindow& b) {
        return std::tie(a.target, a.first_frame, a.last_frame) < std::tie(b.target, b.first_frame, b.last_frame);
    });
    return windows;
}

Vector mix(const Vector& base, const Vector& noise, double share) {
    const Vector v = (1.0 - share) * base + share * noise;
    const double n = v.norm();
    return n > 0.0 ? Vector(v / n) : base;
}

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
    spec.validate();
    Random layout_rng(stream_seed(spec.seed, 0));
    Random embed_rng(stream_seed(spec.seed, 1));
    Random frame_rng(stream_seed(spec.seed, 2));

    Scenario out;
    out.windows = all_windows(spec, layout_rng);
    const int n = spec.identities();
    for (int id = 1; id <= n; ++id) {
        out.bases.push_back(embed_rng.unit_vector(spec.embedding_dim, spec.nonnegative_embeddings));
    }

    // Member offsets on a circle, rotated per group.
    std::vector<Point> offsets(static_cast<std::size_t>(n));
    for (int g = 0; g < spec.n_groups; ++g) {
        const double phase = layout_rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (int m = 0; m < spec.group_size; ++m) {
            const double angle = phase + 2.0 * std::numbers::pi * m / spec.group_size;
            const double r = spec.group_size > 1 ? spec.spread : 0.0;
            offsets[static_cast<std::size_t>(g * spec.group_size + m)] = {r * std::cos(angle), r * std::sin(angle)};
        }
    }

    auto occluded = [&](int id, int frame) {
        return std::any_of(out.windows.begin(), out.windows.end(),
                           [&](const OcclusionWindow& w) { return w.contains(id, frame); });
    };

    out.detections.embedding_dim = spec.embedding_dim;
    out.detections.frames.resize(static_cast<std::size_t>(spec.frames));
    for (int frame = 1; frame <= spec.frames; ++frame) {
        auto& dets = out.detections.frames[static_cast<std::size_t>(frame) - 1];
        for (int id = 1; id <= n; ++id) {
            const int group = (id - 1) / spec.group_size;
            const Point& off = offsets[static_cast<std::size_t>(id) - 1];
            const double cx = 100.0 + spec.speed * (frame - 1) + off.x;
            const double cy = 200.0 + spec.group_spacing * group + off.y;
            const BoundingBox box{cx - kBoxWidth / 2.0, cy - kBoxHeight / 2.0, kBoxWidth, kBoxHeight};
            out.ground_truth.push_back({frame, id, box});

            // Draws happen unconditionally so the stream stays aligned across settings.
            const bool hidden = occluded(id, frame);
            const double drop_draw = frame_rng.uniform();
            const double conf = frame_rng.uniform(0.6, 1.0);
            const double dx = spec.box_jitter * frame_rng.normal();
            const double dy = spec.box_jitter * frame_rng.normal();
            const Vector noise = frame_rng.unit_vector(spec.embedding_dim, spec.nonnegative_embeddings);
            if (hidden && drop_draw < spec.dropout) {
                continue;
            }
            Detection d;
            d.frame = frame;
            d.box = box.translated(dx, dy);
            d.confidence = conf;
            d.embedding = mix(out.bases[static_cast<std::size_t>(id) - 1], noise,
                              hidden ? spec.corruption : spec.embedding_jitter);
            dets.push_back(std::move(d));
        }
        // Detector output carries no identity order.
        for (std::size_t i = dets.size(); i > 1; --i) {
            std::swap(dets[i - 1], dets[frame_rng.index(i)]);
        }
    }
    return out;
}

// ---------------------------------------------------------------- spec file

ScenarioSpec parse_scenario_spec(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = text.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(e.byte, text.size()));
        throw ParseError(source, 1 + static_cast<std::size_t>(std::count(text.begin(), upto, '\n')), e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("$", "scenario spec must be a JSON object");
    }
    auto as_int = [](const json& v, const std::string& key) {
        if (!v.is_number_integer()) {
            throw SchemaError(key, "expected an integer");
        }
        return v.get<long long>();
    };
    auto as_real = [](const json& v, const std::string& key) {
        if (!v.is_number()) {
            throw SchemaError(key, "expected a number");
        }
        return v.get<double>();
    };
    ScenarioSpec s;
    for (const auto& [key, v] : doc.items()) {
        if (key == "seed") {
            const long long seed = as_int(v, key);
            if (seed < 0) {
                throw SchemaError(key, "must be non-negative");
            }
            s.seed = static_cast<std::uint64_t>(seed);
        } else if (key == "n_groups") {
            s.n_groups = static_cast<int>(as_int(v, key));
        } else if (key == "group_size") {
            s.group_size = static_cast<int>(as_int(v, key));
        } else if (key == "frames") {
            s.frames = static_cast<int>(as_int(v, key));
        } else if (key == "speed") {
            s.speed = as_real(v, key);
        } else if (key == "spread") {
            s.spread = as_real(v, key);
        } else if (key == "group_spacing") {
            s.group_spacing = as_real(v, key);
        } else if (key == "occlusions") {
            if (!v.is_array()) {
                throw SchemaError(key, "expected an array of {target, first_frame, last_frame}");
            }
            for (const auto& w : v) {
                if (!w.is_object() || !w.contains("target") || !w.contains("first_frame") ||
                    !w.contains("last_frame") || w.size() != 3) {
                    throw SchemaError(key, "each window needs exactly target, first_frame and last_frame");
                }
                s.occlusions.push_back({static_cast<int>(as_int(w["target"], key)),
                                        static_cast<int>(as_int(w["first_frame"], key)),
                                        static_cast<int>(as_int(w["last_frame"], key))});
            }
        } else if (key == "occlusions_per_target") {
            s.occlusions_per_target = static_cast<int>(as_int(v, key));
        } else if (key == "occlusion_length") {
            s.occlusion_length = static_cast<int>(as_int(v, key));
        } else if (key == "corruption") {
            s.corruption = as_real(v, key);
        } else if (key == "dropout") {
            s.dropout = as_real(v, key);
        } else if (key == "embedding_dim") {
            s.embedding_dim = static_cast<int>(as_int(v, key));
        } else if (key == "embedding_jitter") {
            s.embedding_jitter = as_real(v, key);
        } else if (key == "box_jitter") {
            s.box_jitter = as_real(v, key);
        } else if (key == "nonnegative_embeddings") {
            if (!v.is_boolean()) {
                throw SchemaError(key, "expected true or false");
            }
            s.nonnegative_embeddings = v.get<bool>();
        } else {
            throw SchemaError(key, "unknown scenario key");
        }
    }
    s.validate();
    return s;
}

ScenarioSpec read_scenario_spec(const std::filesystem::path& path) {
    return parse_scenario_spec(read_text_file(path), path.string());
}

// ---------------------------------------------------------------- ablation

std::vector<AblationRow> ablation_run(const Scenario& scenario, std::span<const Variant> variants,
                                      const std::optional<GcnModel>& weights, std::uint64_t weight_seed) {
    std::vector<AblationRow> rows;
    const int dim = scenario.detections.embedding_dim;
    for (const auto& v : variants) {
        GcnModel model;
        if (v.config.num_neighbors > 0) {
            model = weights ? *weights : init_model(v.config.layer_dims(dim), weight_seed, v.config.readout);
        }
        const SequenceResult run = run_sequence(v.config, model, scenario.detections.frames);
        const auto hyp = run.flattened();
        rows.push_back({v.name, evaluate(scenario.ground_truth, hyp), run.stats});
    }
    return rows;
}

std::vector<AblationRow> ablation_run(const ScenarioSpec& spec, std::span<const Variant> variants,
                                      const std::optional<GcnModel>& weights, std::uint64_t weight_seed) {
    return ablation_run(generate(spec), variants, weights, weight_seed);
}

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows) {
    out << "variant,mota,idf1,ids,fp,fn,mt,pt,ml,round1_kept,tau1_demoted,round2_kept,tau2_rejected,"
           "graph_dropped,tracks_created\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.variant;
        std::snprintf(buf, sizeof(buf), ",%.4f,%.4f", r.report.mota, r.report.idf1);
        out << buf << ',' << r.report.id_switches << ',' << r.report.false_positives << ','
            << r.report.false_negatives << ',' << r.report.mostly_tracked << ',' << r.report.partially_tracked << ','
            << r.report.mostly_lost << ',' << r.stats.round1_kept << ',' << r.stats.tau1_demoted << ','
            << r.stats.round2_kept << ',' << r.stats.tau2_rejected << ',' << r.stats.graph_dropped << ','
            << r.stats.tracks_created << '\n';
    }
}

}  // namespace ngt
