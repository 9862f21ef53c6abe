// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_TRACE_HPP
#define LAVABO_TRACE_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lavabo/error.hpp"
#include "lavabo/space.hpp"

namespace lavabo {

enum class Phase { Init, Bo, Random, Grid };

inline std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::Init: return "init";
        case Phase::Bo: return "bo";
        case Phase::Random: return "random";
        case Phase::Grid: return "grid";
    }
    return "?";
}

inline Phase parse_phase(std::string_view s) {
    if (s == "init") return Phase::Init;
    if (s == "bo") return Phase::Bo;
    if (s == "random") return Phase::Random;
    if (s == "grid") return Phase::Grid;
    throw Error(ErrorKind::Data, "unknown phase '" + std::string(s) + "'");
}

struct TraceRow {
    std::size_t iteration;
    Phase phase;
    ParamVector params;
    double score;
    double best_so_far;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Ordered per-evaluation record of one run; best_so_far is the running minimum.
class RunTrace {
public:
    RunTrace() = default;
    explicit RunTrace(std::size_t dimension) : dimension_(dimension) {}

    void append(Phase phase, ParamVector params, double score) {
        const double best = rows_.empty() ? score : std::min(rows_.back().best_so_far, score);
        rows_.push_back({rows_.size(), phase, std::move(params), score, best});
    }

    const std::vector<TraceRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }
    std::size_t dimension() const noexcept { return dimension_; }

    double best() const {
        return rows_.empty() ? std::numeric_limits<double>::infinity() : rows_.back().best_so_far;
    }

    /// 1-based evaluation count at which best_so_far first reaches `target`.
    std::optional<std::size_t> evaluations_to_reach(double target) const {
        for (const auto& r : rows_)
            if (r.best_so_far <= target) return r.iteration + 1;
        return std::nullopt;
    }

    friend bool operator==(const RunTrace&, const RunTrace&) = default;

private:
    std::size_t dimension_ = 0;
    std::vector<TraceRow> rows_;
};

namespace csv {

/// %.17g; round-trips every finite double.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

}  // namespace csv

/// Prefix of the marker line appended to traces of aborted runs.
inline constexpr std::string_view kErrorMarker = "# error: ";

/// Writes `iteration,phase,param_0,...,param_{d-1},score,best_so_far`.
/// An aborted run gets a trailing `# error: <message>` line.
inline void write_trace_csv(std::ostream& out, const RunTrace& trace,
                            const std::optional<std::string>& error = std::nullopt) {
    out << "iteration,phase";
    for (std::size_t i = 0; i < trace.dimension(); ++i) out << ",param_" << i;
    out << ",score,best_so_far\n";
    for (const auto& row : trace.rows()) {
        out << row.iteration << ',' << to_string(row.phase);
        for (const auto& v : row.params.values) {
            out << ',';
            if (const auto* r = std::get_if<double>(&v))
                out << csv::format_real(*r);
            else
                out << csv::escape(std::get<std::string>(v));
        }
        out << ',' << csv::format_real(row.score) << ',' << csv::format_real(row.best_so_far) << '\n';
    }
    if (error) {
        std::string flat = *error;
        for (auto& c : flat)
            if (c == '\n' || c == '\r') c = ' ';
        out << kErrorMarker << flat << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const RunTrace& trace,
                            const std::optional<std::string>& error = std::nullopt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    write_trace_csv(out, trace, error);
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

struct LoadedTrace {
    RunTrace trace;
    std::optional<std::string> error;
};

/// Parses a trace CSV. Numeric-looking param fields become reals, anything
/// else a categorical label.
inline LoadedTrace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Data, "empty trace file");
    const auto header = csv::split_line(line);
    if (header.size() < 4 || header[0] != "iteration" || header[1] != "phase" ||
        header[header.size() - 2] != "score" || header.back() != "best_so_far")
        throw Error(ErrorKind::Data, "unrecognized trace header");
    const std::size_t d = header.size() - 4;

    LoadedTrace loaded{RunTrace(d), std::nullopt};
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.starts_with(kErrorMarker)) {
            loaded.error = line.substr(kErrorMarker.size());
            continue;
        }
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size()) throw Error(ErrorKind::Data, "trace row has wrong field count");
        ParamVector params;
        for (std::size_t i = 0; i < d; ++i) {
            const auto& f = fields[2 + i];
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (!f.empty() && end == f.c_str() + f.size())
                params.values.emplace_back(v);
            else
                params.values.emplace_back(f);
        }
        loaded.trace.append(parse_phase(fields[1]), std::move(params), std::strtod(fields[2 + d].c_str(), nullptr));
    }
    return loaded;
}

inline LoadedTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    return read_trace_csv(in);
}

}  // namespace lavabo

#endif  // LAVABO_TRACE_HPP
