#include "photofx/signals.hpp"

#include "photofx/error.hpp"
#include "photofx/signal_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace photofx {

using nlohmann::json;

namespace {

struct FieldSpec {
    const char* name;
    double PhotoParams::*member;
    double lo;
    double hi;
};

constexpr FieldSpec kFields[] = {
    {"K", &PhotoParams::K, 0.0, 1.0},
    {"d_f", &PhotoParams::d_f, 0.0, 1.0},
    {"f", &PhotoParams::f, 0.0, 1.0},
    {"S", &PhotoParams::S, -1.0, 1.0},
    {"T", &PhotoParams::T, -1.0, 1.0},
};

std::string range_text(const FieldSpec& spec) {
    std::ostringstream os;
    os << "[" << spec.lo << ", " << spec.hi << "]";
    return os.str();
}

std::string check_params(const PhotoParams& p) {
    for (const FieldSpec& spec : kFields) {
        const double v = p.*spec.member;
        if (!(v >= spec.lo && v <= spec.hi)) {
            std::ostringstream os;
            os << "field " << spec.name << " = " << v << " outside " << range_text(spec);
            return os.str();
        }
    }
    return {};
}

}  // namespace

void validate(const PhotoParams& params) {
    if (auto msg = check_params(params); !msg.empty()) throw Error(ErrorKind::Validation, msg);
}

void validate(const PhotoSignal& signal) {
    if (signal.per_frame.empty()) throw Error(ErrorKind::Validation, "photo signal: no frames");
    for (std::size_t i = 0; i < signal.size(); ++i) {
        if (auto msg = check_params(signal.per_frame[i]); !msg.empty()) {
            throw Error(ErrorKind::Validation, "frame " + std::to_string(i) + ": " + msg);
        }
    }
}

void validate(const TrajSignal& signal) {
    if (signal.per_frame.empty()) throw Error(ErrorKind::Validation, "trajectory: no frames");
    constexpr double tol = 1e-5;
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const Extrinsic& m = signal.per_frame[i];
        auto r = [&](int row, int col) { return m[static_cast<std::size_t>(row * 4 + col)]; };
        for (double v : m) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::Validation, "frame " + std::to_string(i) + ": non-finite extrinsic entry");
            }
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                double dot = 0.0;
                for (int k = 0; k < 3; ++k) dot += r(a, k) * r(b, k);
                if (std::abs(dot - (a == b ? 1.0 : 0.0)) > tol) {
                    throw Error(ErrorKind::Validation,
                                "frame " + std::to_string(i) + ": rotation block is not orthonormal");
                }
            }
        }
        const double det = r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) -
                           r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0)) +
                           r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
        if (std::abs(det - 1.0) > tol) {
            throw Error(ErrorKind::Validation, "frame " + std::to_string(i) + ": rotation determinant is not +1");
        }
    }
}

TrajSignal identity_traj(std::size_t frames) {
    if (frames == 0) throw Error(ErrorKind::InvalidArgument, "identity_traj: frame count must be >= 1");
    constexpr Extrinsic identity{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
    return TrajSignal{std::vector<Extrinsic>(frames, identity)};
}

PhotoSignal constant_signal(const PhotoParams& params, std::size_t frames) {
    if (frames == 0) throw Error(ErrorKind::InvalidArgument, "constant_signal: frame count must be >= 1");
    validate(params);
    return PhotoSignal{std::vector<PhotoParams>(frames, params)};
}

PhotoSignal ramp_signal(const PhotoParams& start, const PhotoParams& end, std::size_t frames) {
    if (frames == 0) throw Error(ErrorKind::InvalidArgument, "ramp_signal: frame count must be >= 1");
    validate(start);
    validate(end);
    PhotoSignal out;
    out.per_frame.reserve(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        if (i + 1 == frames && frames > 1) {
            out.per_frame.push_back(end);
            continue;
        }
        const double t = frames == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(frames - 1);
        PhotoParams p;
        for (const FieldSpec& spec : kFields) {
            const double a = start.*spec.member;
            const double b = end.*spec.member;
            p.*spec.member = a == b ? a : a + (b - a) * t;
        }
        out.per_frame.push_back(p);
    }
    return out;
}

// --- JSON ------------------------------------------------------------------

namespace {

double number_at(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        std::size_t used = 0;
        try {
            const double d = std::stod(s, &used);
            if (used == s.size()) return d;
        } catch (const std::exception&) {
        }
        throw Error(ErrorKind::Parse, where + ": \"" + s + "\" is not a number");
    }
    throw Error(ErrorKind::Parse, where + ": expected a number");
}

}  // namespace

json to_json_value(const TrajSignal& signal) {
    json rows = json::array();
    for (const Extrinsic& m : signal.per_frame) rows.push_back(m);
    return rows;
}

TrajSignal traj_from_json(const json& rows, const std::string& where) {
    if (!rows.is_array()) throw Error(ErrorKind::Parse, where + ": expected an array of 12-element rows");
    TrajSignal out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        const json& row = rows[i];
        if (!row.is_array() || row.size() != 12) throw Error(ErrorKind::Parse, at + ": expected 12 numbers");
        Extrinsic m{};
        for (std::size_t k = 0; k < 12; ++k) m[k] = number_at(row[k], at + "[" + std::to_string(k) + "]");
        out.per_frame.push_back(m);
    }
    return out;
}

json to_json_value(const PhotoSignal& signal, const std::optional<TrajSignal>& trajectory) {
    json doc = json::object();
    doc["frames"] = signal.size();
    for (const FieldSpec& spec : kFields) {
        json values = json::array();
        for (const PhotoParams& p : signal.per_frame) values.push_back(p.*spec.member);
        doc[spec.name] = std::move(values);
    }
    if (trajectory) doc["trajectory"] = to_json_value(*trajectory);
    return doc;
}

ControlSignals control_signals_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::Parse, "signal: expected a JSON object");

    std::optional<std::size_t> frames;
    if (auto it = doc.find("frames"); it != doc.end()) {
        const double n = number_at(*it, "frames");
        if (n < 1 || n != std::floor(n)) throw Error(ErrorKind::Parse, "frames: expected a positive integer");
        frames = static_cast<std::size_t>(n);
    }
    for (const FieldSpec& spec : kFields) {
        auto it = doc.find(spec.name);
        if (it == doc.end()) throw Error(ErrorKind::Parse, std::string("missing field \"") + spec.name + "\"");
        if (it->is_array()) {
            if (frames && *frames != it->size()) {
                throw Error(ErrorKind::Parse, std::string(spec.name) + ": has " + std::to_string(it->size()) +
                                                  " entries, expected " + std::to_string(*frames));
            }
            frames = it->size();
        }
    }
    const std::size_t n = frames.value_or(1);
    if (n == 0) throw Error(ErrorKind::Parse, "signal: zero frames");

    ControlSignals out;
    out.photo.per_frame.resize(n);
    for (const FieldSpec& spec : kFields) {
        const json& v = doc.at(spec.name);
        for (std::size_t i = 0; i < n; ++i) {
            out.photo.per_frame[i].*spec.member =
                v.is_array() ? number_at(v[i], std::string(spec.name) + "[" + std::to_string(i) + "]")
                             : number_at(v, spec.name);
        }
    }
    validate(out.photo);

    if (auto it = doc.find("trajectory"); it != doc.end() && !it->is_null()) {
        TrajSignal traj = traj_from_json(*it);
        if (traj.size() != n) {
            throw Error(ErrorKind::Parse, "trajectory: has " + std::to_string(traj.size()) + " rows, expected " +
                                              std::to_string(n));
        }
        validate(traj);
        out.trajectory = std::move(traj);
    }
    return out;
}

std::string serialize(const PhotoSignal& signal, const std::optional<TrajSignal>& trajectory) {
    validate(signal);
    if (trajectory) validate(*trajectory);
    return to_json_value(signal, trajectory).dump(2) + "\n";
}

ControlSignals deserialize(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, "signal: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return control_signals_from_json(doc);
}

ControlSignals load_signal_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open signal file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

}  // namespace photofx
