#include "ngt/io_formats.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace ngt {

using nlohmann::json;

std::size_t DetectionSequence::detection_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) {
        n += f.size();
    }
    return n;
}

std::string format_real(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

// Line-oriented CSV reader with locations for error messages.
class CsvCursor {
public:
    CsvCursor(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!trim(line).empty()) {
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(source_, line_no_, message); }

    double real(std::string_view field, const char* what) const {
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
            fail(std::string("cannot parse ") + what + " '" + std::string(field) + "'");
        }
        if (!std::isfinite(v)) {
            fail(std::string("non-finite ") + what);
        }
        return v;
    }

    int integer(std::string_view field, const char* what) const {
        int v = 0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
            fail(std::string("expected an integer ") + what + ", got '" + std::string(field) + "'");
        }
        return v;
    }

    BoundingBox box(std::span<const std::string_view> f) const {
        BoundingBox b{real(f[0], "bb_left"), real(f[1], "bb_top"), real(f[2], "bb_width"), real(f[3], "bb_height")};
        if (!b.valid()) {
            fail("box width and height must be positive");
        }
        return b;
    }

    std::size_t line() const { return line_no_; }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
};

void write_fixed2(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    out << buf;
}

std::string format_17g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i + 1 < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
            }
        }
        throw ParseError(source, line, e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------- detections

DetectionSequence parse_detections(std::istream& in, const std::string& source) {
    CsvCursor cursor(in, source);
    std::string line;
    if (!cursor.next(line)) {
        throw ParseError(source, 1, "missing '# ngt-det v1 d=<int>' header");
    }
    DetectionSequence seq;
    {
        std::istringstream header{std::string(trim(line))};
        std::string hash, magic, version, dim_token;
        header >> hash >> magic >> version >> dim_token;
        if (hash != "#" || magic != "ngt-det" || version != "v1" || dim_token.rfind("d=", 0) != 0) {
            cursor.fail("expected header '# ngt-det v1 d=<int>'");
        }
        const std::string_view dim_text = std::string_view(dim_token).substr(2);
        int d = 0;
        const auto res = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), d);
        if (res.ec != std::errc() || res.ptr != dim_text.data() + dim_text.size() || d < 1) {
            cursor.fail("embedding dimension must be a positive integer");
        }
        seq.embedding_dim = d;
        std::string extra;
        while (header >> extra) {
            if (extra.rfind("seq=", 0) == 0 && extra.size() > 4) {
                seq.name = extra.substr(4);
            } else {
                cursor.fail("unexpected header token '" + extra + "'");
            }
        }
    }

    const std::size_t columns = 6 + static_cast<std::size_t>(seq.embedding_dim);
    int last_frame = 0;
    while (cursor.next(line)) {
        const auto f = split_csv(line);
        if (f.size() != columns) {
            cursor.fail("expected " + std::to_string(columns) + " columns for d=" + std::to_string(seq.embedding_dim) +
                        ", found " + std::to_string(f.size()));
        }
        Detection d;
        d.frame = cursor.integer(f[0], "frame");
        if (d.frame < 1) {
            cursor.fail("frame numbers start at 1");
        }
        if (d.frame < last_frame) {
            cursor.fail("frame " + std::to_string(d.frame) + " after frame " + std::to_string(last_frame) +
                        "; rows must be grouped by increasing frame");
        }
        last_frame = d.frame;
        d.box = cursor.box(std::span(f).subspan(1, 4));
        d.confidence = cursor.real(f[5], "confidence");
        if (d.confidence < 0.0 || d.confidence > 1.0) {
            cursor.fail("confidence must lie in [0, 1]");
        }
        d.embedding.resize(seq.embedding_dim);
        for (int k = 0; k < seq.embedding_dim; ++k) {
            d.embedding(k) = cursor.real(f[6 + static_cast<std::size_t>(k)], "embedding value");
        }
        if (seq.frames.size() < static_cast<std::size_t>(d.frame)) {
            seq.frames.resize(static_cast<std::size_t>(d.frame));
        }
        seq.frames[static_cast<std::size_t>(d.frame) - 1].push_back(std::move(d));
    }
    return seq;
}

DetectionSequence read_detections(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_detections(in, path.string());
}

void write_detections(std::ostream& out, const DetectionSequence& seq) {
    out << "# ngt-det v1 d=" << seq.embedding_dim;
    if (!seq.name.empty()) {
        out << " seq=" << seq.name;
    }
    out << '\n';
    for (const auto& frame : seq.frames) {
        for (const auto& d : frame) {
            if (d.embedding.size() != seq.embedding_dim) {
                throw InvalidInput("embedding dimension differs from the sequence header");
            }
            out << d.frame << ',' << format_real(d.box.left) << ',' << format_real(d.box.top) << ','
                << format_real(d.box.width) << ',' << format_real(d.box.height) << ',' << format_real(d.confidence);
            for (Eigen::Index k = 0; k < d.embedding.size(); ++k) {
                out << ',' << format_real(d.embedding(k));
            }
            out << '\n';
        }
    }
}

void write_detections(const std::filesystem::path& path, const DetectionSequence& seq) {
    auto out = open_output(path);
    write_detections(out, seq);
}

// ---------------------------------------------------------------- results / ground truth

namespace {

std::vector<LabeledBox> parse_mot(std::istream& in, const std::string& source, bool ground_truth) {
    CsvCursor cursor(in, source);
    std::vector<LabeledBox> out;
    std::string line;
    while (cursor.next(line)) {
        const auto f = split_csv(line);
        const bool ok = f.size() == 10 || (ground_truth && f.size() == 9);
        if (!ok) {
            cursor.fail(std::string("expected ") + (ground_truth ? "9 or 10" : "10") + " columns, found " +
                        std::to_string(f.size()));
        }
        LabeledBox b;
        b.frame = cursor.integer(f[0], "frame");
        b.id = cursor.integer(f[1], "id");
        if (b.frame < 1) {
            cursor.fail("frame numbers start at 1");
        }
        if (b.id < 1) {
            cursor.fail("ids must be positive");
        }
        b.box = cursor.box(std::span(f).subspan(2, 4));
        const double conf = cursor.real(f[6], "confidence");
        for (std::size_t k = 7; k < f.size(); ++k) {
            cursor.real(f[k], "trailing column");
        }
        if (ground_truth && conf == 0.0) {
            continue;
        }
        out.push_back(b);
    }
    return out;
}

}  // namespace

std::vector<LabeledBox> parse_results(std::istream& in, const std::string& source) {
    return parse_mot(in, source, false);
}

std::vector<LabeledBox> read_results(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_results(in, path.string());
}

std::vector<LabeledBox> parse_ground_truth(std::istream& in, const std::string& source) {
    return parse_mot(in, source, true);
}

std::vector<LabeledBox> read_ground_truth(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_ground_truth(in, path.string());
}

void write_results(std::ostream& out, std::span<const LabeledBox> boxes) {
    for (const auto& b : boxes) {
        out << b.frame << ',' << b.id << ',';
        write_fixed2(out, b.box.left);
        out << ',';
        write_fixed2(out, b.box.top);
        out << ',';
        write_fixed2(out, b.box.width);
        out << ',';
        write_fixed2(out, b.box.height);
        out << ",1,-1,-1,-1\n";
    }
}

void write_results(const std::filesystem::path& path, std::span<const LabeledBox> boxes) {
    auto out = open_output(path);
    write_results(out, boxes);
}

// ---------------------------------------------------------------- weights

GcnModel parse_weights(const std::string& text, const std::string& source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object()) {
        throw SchemaError("$", "weights document must be an object");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "dims" && key != "layers") {
            throw SchemaError(key, "unknown key");
        }
    }
    if (!doc.contains("dims") || !doc["dims"].is_array()) {
        throw SchemaError("dims", "missing or not an array");
    }
    if (!doc.contains("layers") || !doc["layers"].is_array()) {
        throw SchemaError("layers", "missing or not an array");
    }
    std::vector<int> dims;
    for (const auto& d : doc["dims"]) {
        if (!d.is_number_integer() || d.get<long long>() <= 0) {
            throw SchemaError("dims", "entries must be positive integers");
        }
        dims.push_back(d.get<int>());
    }
    const auto& layers = doc["layers"];
    if (dims.size() < 2 || layers.size() != dims.size() - 1) {
        throw SchemaError("layers", "expected " + std::to_string(dims.empty() ? 0 : dims.size() - 1) +
                                        " layers for the given dims");
    }
    GcnModel model;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string where = "layers[" + std::to_string(l) + "]";
        const auto& layer = layers[l];
        if (!layer.is_object() || !layer.contains("rows") || !layer.contains("cols") || !layer.contains("data")) {
            throw SchemaError(where, "needs rows, cols and data");
        }
        for (const auto& [key, _] : layer.items()) {
            if (key != "rows" && key != "cols" && key != "data") {
                throw SchemaError(where + "." + key, "unknown key");
            }
        }
        if (!layer["rows"].is_number_integer() || !layer["cols"].is_number_integer() || !layer["data"].is_array()) {
            throw SchemaError(where, "rows/cols must be integers and data an array");
        }
        const long long rows = layer["rows"].get<long long>();
        const long long cols = layer["cols"].get<long long>();
        if (rows != dims[l] || cols != dims[l + 1]) {
            throw SchemaError(where, "shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                                         " does not match dims " + std::to_string(dims[l]) + "x" +
                                         std::to_string(dims[l + 1]));
        }
        const auto& data = layer["data"];
        if (data.size() != static_cast<std::size_t>(rows * cols)) {
            throw SchemaError(where + ".data", "expected " + std::to_string(rows * cols) + " values, found " +
                                                   std::to_string(data.size()));
        }
        Eigen::MatrixXd w(rows, cols);
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const auto& v = data[k++];
                if (!v.is_number()) {
                    throw SchemaError(where + ".data", "non-numeric entry at index " + std::to_string(k - 1));
                }
                w(r, c) = v.get<double>();
            }
        }
        model.layers.push_back(std::move(w));
    }
    return model;
}

GcnModel read_weights(const std::filesystem::path& path) { return parse_weights(read_text_file(path), path.string()); }

void write_weights(std::ostream& out, const GcnModel& model) {
    model.validate();
    const auto dims = model.dims();
    out << "{\n  \"dims\": [";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        out << (i ? ", " : "") << dims[i];
    }
    out << "],\n  \"layers\": [\n";
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& w = model.layers[l];
        out << "    {\"rows\": " << w.rows() << ", \"cols\": " << w.cols() << ", \"data\": [";
        bool first = true;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                out << (first ? "" : ", ") << format_17g(w(r, c));
                first = false;
            }
        }
        out << "]}" << (l + 1 < model.layers.size() ? "," : "") << '\n';
    }
    out << "  ]\n}\n";
}

void write_weights(const std::filesystem::path& path, const GcnModel& model) {
    auto out = open_output(path);
    write_weights(out, model);
}

// ---------------------------------------------------------------- config

namespace {

double real_field(const json& v, const std::string& key) {
    if (!v.is_number()) {
        throw SchemaError(key, "expected a number");
    }
    return v.get<double>();
}

int int_field(const json& v, const std::string& key) {
    if (!v.is_number_integer()) {
        throw SchemaError(key, "expected an integer");
    }
    const long long x = v.get<long long>();
    if (x < -1'000'000'000LL || x > 1'000'000'000LL) {
        throw SchemaError(key, "integer out of range");
    }
    return static_cast<int>(x);
}

}  // namespace

TrackerConfig parse_config(const std::string& text, const std::string& source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object()) {
        throw SchemaError("$", "config must be a JSON object");
    }
    TrackerConfig c;
    for (const auto& [key, value] : doc.items()) {
        if (key == "tau1") {
            c.tau1 = real_field(value, key);
        } else if (key == "tau2") {
            c.tau2 = real_field(value, key);
        } else if (key == "K") {
            c.num_neighbors = int_field(value, key);
        } else if (key == "mu") {
            c.mu = real_field(value, key);
        } else if (key == "lambda_motion") {
            c.lambda_motion = real_field(value, key);
        } else if (key == "max_age") {
            c.max_age = int_field(value, key);
        } else if (key == "min_confidence") {
            c.min_confidence = real_field(value, key);
        } else if (key == "gating_threshold") {
            c.gating_threshold = real_field(value, key);
        } else if (key == "embedding_dim") {
            c.embedding_dim = int_field(value, key);
        } else if (key == "gcn_layer_dims") {
            if (!value.is_array()) {
                throw SchemaError(key, "expected an array of integers");
            }
            c.gcn_layer_dims.clear();
            for (const auto& d : value) {
                c.gcn_layer_dims.push_back(int_field(d, key));
            }
        } else if (key == "readout") {
            if (!value.is_string()) {
                throw SchemaError(key, "expected \"target\" or \"mean\"");
            }
            c.readout = readout_from_string(value.get<std::string>());
        } else {
            throw SchemaError(key, "unknown config key");
        }
    }
    c.validate();
    return c;
}

TrackerConfig read_config(const std::filesystem::path& path) { return parse_config(read_text_file(path), path.string()); }

void write_config(std::ostream& out, const TrackerConfig& c) {
    out << "{\n";
    out << "  \"tau1\": " << format_real(c.tau1) << ",\n";
    out << "  \"tau2\": " << format_real(c.tau2) << ",\n";
    out << "  \"K\": " << c.num_neighbors << ",\n";
    out << "  \"mu\": " << format_real(c.mu) << ",\n";
    out << "  \"lambda_motion\": " << format_real(c.lambda_motion) << ",\n";
    out << "  \"max_age\": " << c.max_age << ",\n";
    out << "  \"min_confidence\": " << format_real(c.min_confidence) << ",\n";
    out << "  \"gating_threshold\": " << format_real(c.gating_threshold) << ",\n";
    out << "  \"embedding_dim\": " << c.embedding_dim << ",\n";
    out << "  \"gcn_layer_dims\": [";
    for (std::size_t i = 0; i < c.gcn_layer_dims.size(); ++i) {
        out << (i ? ", " : "") << c.gcn_layer_dims[i];
    }
    out << "],\n";
    out << "  \"readout\": \"" << to_string(c.readout) << "\"\n";
    out << "}\n";
}

void write_config(const std::filesystem::path& path, const TrackerConfig& config) {
    auto out = open_output(path);
    write_config(out, config);
}

}  // namespace ngt
