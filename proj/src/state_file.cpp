#include "spinqrf/state_file.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "spinqrf/errors.hpp"

namespace spinqrf {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) throw InputError(where + " must be a number");
    return j.get<double>();
}

Vec3 vec3_at(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) {
        throw InputError(where + " must be an array of 3 numbers");
    }
    return {number_at(j[0], where), number_at(j[1], where), number_at(j[2], where)};
}

Complex complex_at(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw InputError(where + " must be [re, im]");
    return {number_at(j[0], where), number_at(j[1], where)};
}

SpinQuantumNumber spin_at(const json& j, const std::string& where) {
    try {
        return SpinQuantumNumber::from_value(number_at(j, where));
    } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
    }
}

Frame frame_at(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw InputError(where + " must have 3 rows");
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        m.row(r) = vec3_at(j[static_cast<std::size_t>(r)],
                           where + " row " + std::to_string(r)).transpose();
    }
    try {
        return Frame::from_rows(m);
    } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
    }
}

SystemB system_at(const json& j, const std::string& where,
                  std::vector<std::string>* warnings) {
    if (!j.is_object()) throw InputError(where + " must be an object");
    const std::string form = j.value("form", "");
    if (!j.contains("s")) throw InputError(where + " is missing \"s\"");
    const auto s = spin_at(j["s"], where + ".s");
    if (form == "label") {
        if (!j.contains("n") || !j.contains("m")) {
            throw InputError(where + " label form needs \"n\" and \"m\"");
        }
        const Vec3 n = vec3_at(j["n"], where + ".n");
        try {
            return SystemB::label(n, number_at(j["m"], where + ".m"), s);
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    if (form == "vector") {
        if (!j.contains("amps") || !j["amps"].is_array()) {
            throw InputError(where + " vector form needs an \"amps\" array");
        }
        const json& a = j["amps"];
        if (static_cast<int>(a.size()) != s.dim()) {
            throw InputError(where + ".amps must have " + std::to_string(s.dim()) + " entries");
        }
        CVector v(s.dim());
        for (int k = 0; k < s.dim(); ++k) {
            v(k) = complex_at(a[static_cast<std::size_t>(k)],
                              where + ".amps[" + std::to_string(k) + "]");
        }
        const double norm = v.norm();
        if (norm == 0.0) throw InputError(where + ".amps is the zero vector");
        if (std::abs(norm - 1.0) > 1e-6 && warnings) {
            warnings->push_back(where + ": B amplitudes renormalized (norm " +
                                format_number(norm) + ")");
        }
        if (std::abs(norm - 1.0) > 1e-12) v /= norm;
        return SystemB::vector(SpinState(s, std::move(v)));
    }
    throw InputError(where + ".form must be \"label\" or \"vector\"");
}

class Writer {
public:
    void line(int indent, const std::string& text) {
        out_ << std::string(static_cast<std::size_t>(indent) * 2, ' ') << text << '\n';
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string vec_text(const Vec3& v) {
    return "[" + format_number(v.x()) + ", " + format_number(v.y()) + ", " +
           format_number(v.z()) + "]";
}

std::string complex_text(Complex c) {
    return "[" + format_number(c.real()) + ", " + format_number(c.imag()) + "]";
}

std::string quoted(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string format_spin(SpinQuantumNumber j) {
    return j.twice() % 2 == 0 ? std::to_string(j.twice() / 2)
                              : std::to_string(j.twice() / 2) + ".5";
}

StateFile parse_state_file(const std::string& text, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("state file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("state file must be a JSON object");

    StateFile file;
    if (doc.contains("j")) {
        const json& j = doc["j"];
        if (j.is_string()) {
            if (j.get<std::string>() != "infinite") {
                throw InputError("\"j\" must be \"infinite\" or a multiple of 1/2");
            }
        } else {
            file.j = spin_at(j, "j");
        }
    }
    file.state.perspective = doc.value("perspective", "C");
    file.state.described = doc.value("described", "A");

    if (!doc.contains("branches") || !doc["branches"].is_array() || doc["branches"].empty()) {
        throw InputError("state file needs a non-empty \"branches\" array");
    }
    std::size_t index = 0;
    for (const json& b : doc["branches"]) {
        const std::string where = "branch " + std::to_string(index++);
        if (!b.is_object()) throw InputError(where + " must be an object");
        for (const char* key : {"amp", "frame", "system"}) {
            if (!b.contains(key)) throw InputError(where + " is missing \"" + key + "\"");
        }
        const Complex amp = complex_at(b["amp"], where + " amp");
        Frame frame = frame_at(b["frame"], where + " frame");
        SystemB system = system_at(b["system"], where + " system", warnings);
        if (!file.state.branches.empty() &&
            system.spin() != file.state.branches.front().system.spin()) {
            throw InputError(where + " system: spin differs from branch 0");
        }
        file.state.branches.push_back(Branch{amp, std::move(frame), std::move(system)});
    }

    double norm_sq = 0.0;
    try {
        norm_sq = idealized_norm_squared(file.state);
    } catch (const InputError& e) {
        throw InputError(std::string("state file: ") + e.what());
    }
    if (norm_sq <= 0.0) throw InputError("state file describes the zero vector");
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-6) {
        if (warnings) {
            warnings->push_back("branch amplitudes renormalized (norm " +
                                format_number(std::sqrt(norm_sq)) + ")");
        }
        for (auto& b : file.state.branches) b.amplitude /= std::sqrt(norm_sq);
    }
    return file;
}

std::string serialize_state_file(const StateFile& file) {
    Writer w;
    w.line(0, "{");
    w.line(1, "\"j\": " + (file.j ? format_spin(*file.j) : std::string("\"infinite\"")) + ",");
    w.line(1, "\"perspective\": " + quoted(file.state.perspective) + ",");
    w.line(1, "\"described\": " + quoted(file.state.described) + ",");
    w.line(1, "\"branches\": [");
    const auto& branches = file.state.branches;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const Branch& b = branches[i];
        w.line(2, "{");
        w.line(3, "\"amp\": " + complex_text(b.amplitude) + ",");
        w.line(3, "\"frame\": [");
        for (int r = 0; r < 3; ++r) {
            w.line(4, vec_text(b.frame.axis(r)) + (r < 2 ? "," : ""));
        }
        w.line(3, "],");
        w.line(3, "\"system\": {");
        if (b.system.is_label()) {
            const auto& l = b.system.as_label();
            w.line(4, "\"form\": \"label\",");
            w.line(4, "\"n\": " + vec_text(l.n) + ",");
            w.line(4, "\"m\": " + format_number(l.m) + ",");
            w.line(4, "\"s\": " + format_spin(l.s));
        } else {
            const auto& v = b.system.as_vector();
            w.line(4, "\"form\": \"vector\",");
            w.line(4, "\"s\": " + format_spin(v.spin()) + ",");
            w.line(4, "\"amps\": [");
            for (int k = 0; k < v.dim(); ++k) {
                w.line(5, complex_text(v.amplitude(k)) + (k + 1 < v.dim() ? "," : ""));
            }
            w.line(4, "]");
        }
        w.line(3, "}");
        w.line(2, i + 1 < branches.size() ? "}," : "}");
    }
    w.line(1, file.finite_j ? "]," : "]");
    if (file.finite_j) {
        w.line(1, "\"finite_j\": {\"j\": " + format_spin(file.finite_j->j) +
                      ", \"b_fidelity\": " + format_number(file.finite_j->b_fidelity) + "}");
    }
    w.line(0, "}");
    return w.str();
}

Frame parse_frame_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("frame file is not valid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("frame")) return frame_at(doc["frame"], "frame");
    return parse_state_file(text).state.branches.front().frame;
}

}  // namespace spinqrf
