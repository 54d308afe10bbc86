// io.hpp
// File formats: the JSON ensemble format (round-trips every double exactly),
// Gram matrices for the from-gram generator, and CSV number formatting.
//
// Ensemble file: a UTF-8 JSON object
//   { "d": <int>, "m": <int>, "states": [ [ [re, im], ... d entries ], ... m ] }
//
// Gram file: either a bare m x m nested array or { "gram": [...] }; entries
// are real numbers or [re, im] pairs.

#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "discrimlab/ensemble.hpp"

namespace discrimlab {

// Unreadable/unwritable paths (CLI exit code 3).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Readable but malformed content (CLI exit code 2).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

// Shortest-round-trip then fixed 17-significant-digit formatting: %.17g is
// enough to reconstruct any double exactly.
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

inline json ensemble_to_json(const StateEnsemble& e) {
    validate_ensemble(e);
    json states = json::array();
    for (const Vector& v : e.states) {
        json amplitudes = json::array();
        for (int k = 0; k < e.d; ++k) {
            amplitudes.push_back({v(k).real(), v(k).imag()});
        }
        states.push_back(std::move(amplitudes));
    }
    return json{{"d", e.d}, {"m", e.m()}, {"states", std::move(states)}};
}

inline StateEnsemble ensemble_from_json(const json& j) {
    if (!j.is_object() || !j.contains("d") || !j.contains("m") || !j.contains("states")) {
        throw FormatError("ensemble file: expected object with fields d, m, states");
    }
    if (!j["d"].is_number_integer() || !j["m"].is_number_integer() || !j["states"].is_array()) {
        throw FormatError("ensemble file: d and m must be integers, states an array");
    }
    const int d = j["d"].get<int>();
    const int m = j["m"].get<int>();
    if (d < 1 || m < 2) {
        throw FormatError("ensemble file: require d >= 1 and m >= 2");
    }
    if (static_cast<int>(j["states"].size()) != m) {
        std::ostringstream msg;
        msg << "ensemble file: expected " << m << " states, found " << j["states"].size();
        throw FormatError(msg.str());
    }
    StateEnsemble e;
    e.d = d;
    e.states.reserve(m);
    for (const json& state : j["states"]) {
        if (!state.is_array() || static_cast<int>(state.size()) != d) {
            throw FormatError("ensemble file: each state must list d amplitudes");
        }
        Vector v(d);
        int k = 0;
        for (const json& amp : state) {
            if (!amp.is_array() || amp.size() != 2 || !amp[0].is_number() || !amp[1].is_number()) {
                throw FormatError("ensemble file: amplitudes must be [re, im] pairs");
            }
            v(k++) = Complex(amp[0].get<double>(), amp[1].get<double>());
        }
        e.states.push_back(std::move(v));
    }
    try {
        validate_ensemble(e);
    } catch (const std::invalid_argument& err) {
        throw FormatError(std::string("ensemble file: ") + err.what());
    }
    return e;
}

inline void save_ensemble(const StateEnsemble& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << ensemble_to_json(e).dump(2) << "\n";
    if (!out.good()) {
        throw IoError("write failed: " + path);
    }
}

inline StateEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw FormatError(std::string("ensemble file: invalid JSON: ") + err.what());
    }
    return ensemble_from_json(j);
}

namespace detail {

inline Complex json_entry_to_complex(const json& entry) {
    if (entry.is_number()) {
        return Complex(entry.get<double>(), 0.0);
    }
    if (entry.is_array() && entry.size() == 2 && entry[0].is_number() && entry[1].is_number()) {
        return Complex(entry[0].get<double>(), entry[1].get<double>());
    }
    throw FormatError("gram file: entries must be numbers or [re, im] pairs");
}

}  // namespace detail

inline Matrix load_gram(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw FormatError(std::string("gram file: invalid JSON: ") + err.what());
    }
    const json* rows = nullptr;
    if (j.is_array()) {
        rows = &j;
    } else if (j.is_object() && j.contains("gram") && j["gram"].is_array()) {
        rows = &j["gram"];
    } else {
        throw FormatError("gram file: expected a nested array or an object with field gram");
    }
    const int m = static_cast<int>(rows->size());
    if (m < 2) {
        throw FormatError("gram file: need at least a 2x2 matrix");
    }
    Matrix g(m, m);
    for (int i = 0; i < m; ++i) {
        const json& row = (*rows)[i];
        if (!row.is_array() || static_cast<int>(row.size()) != m) {
            throw FormatError("gram file: matrix must be square");
        }
        for (int k = 0; k < m; ++k) {
            g(i, k) = detail::json_entry_to_complex(row[k]);
        }
    }
    return g;
}

}  // namespace discrimlab
