#include "varhardy/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "varhardy/errors.hpp"

namespace varhardy::io {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isinf(v) && v > 0) return "\"inf\"";
    if (!std::isfinite(v)) throw FormatError("cannot serialize a non-finite number");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

double number_of(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw FormatError("expected a number or \"inf\", got " + j.dump());
}

std::vector<double> numbers_of(const json& j, const char* field) {
    if (!j.is_array()) throw FormatError(std::string("field '") + field + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(number_of(v));
    return out;
}

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) {
        throw FormatError(std::string("missing field '") + name + "'");
    }
    return j.at(name);
}

template <typename Range>
void write_numbers(std::string& out, const Range& values) {
    out += '[';
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        first = false;
        out += format_number(v);
    }
    out += ']';
}

}  // namespace

std::string serialize_space(const FiltrationSpace& space) {
    std::string out = "{\"weights\":";
    write_numbers(out, space.weights());
    out += ",\"levels\":[";
    for (int n = 0; n <= space.depth(); ++n) {
        if (n > 0) out += ',';
        out += '[';
        const auto& cells = space.cells(n);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out += ',';
            out += '[';
            for (std::size_t i = 0; i < cells[c].size(); ++i) {
                if (i > 0) out += ',';
                out += std::to_string(cells[c][i]);
            }
            out += ']';
        }
        out += ']';
    }
    out += "]}\n";
    return out;
}

FiltrationSpace parse_space(std::string_view text) {
    const json j = parse_json(text);
    std::vector<double> weights = numbers_of(field(j, "weights"), "weights");
    const json& levels_json = field(j, "levels");
    if (!levels_json.is_array()) throw FormatError("field 'levels' must be an array");
    std::vector<FiltrationSpace::Partition> levels;
    for (const auto& partition_json : levels_json) {
        FiltrationSpace::Partition partition;
        for (const auto& cell_json : partition_json) {
            FiltrationSpace::Cell cell;
            for (const auto& idx : cell_json) {
                if (!idx.is_number_unsigned() && !(idx.is_number_integer() && idx.get<long long>() >= 0)) {
                    throw FormatError("outcome indices must be nonnegative integers");
                }
                cell.push_back(idx.get<std::size_t>());
            }
            partition.push_back(std::move(cell));
        }
        levels.push_back(std::move(partition));
    }
    return FiltrationSpace::build(std::move(weights), std::move(levels));
}

std::string serialize_values(const RandomVariable& x) {
    std::string out = "{\"values\":";
    write_numbers(out, x.values());
    out += "}\n";
    return out;
}

RandomVariable parse_values(std::string_view text) {
    const json j = parse_json(text);
    return RandomVariable(numbers_of(field(j, "values"), "values"));
}

std::string serialize_exponent(const Exponent& p) { return serialize_values(p.values()); }

Exponent parse_exponent(std::string_view text) { return Exponent(parse_values(text)); }

std::string serialize_martingale(const Martingale& f) {
    std::string out = "{\"levels\":[";
    for (int n = 0; n <= f.depth(); ++n) {
        if (n > 0) out += ',';
        write_numbers(out, f.at(n).values());
    }
    out += "]}\n";
    return out;
}

Martingale parse_martingale(const FiltrationSpace& space, std::string_view text) {
    const json j = parse_json(text);
    if (j.is_object() && j.contains("terminal")) {
        return martingale_from_terminal(space, RandomVariable(numbers_of(j.at("terminal"), "terminal")));
    }
    const json& levels_json = field(j, "levels");
    if (!levels_json.is_array()) throw FormatError("field 'levels' must be an array");
    std::vector<RandomVariable> levels;
    for (const auto& level : levels_json) levels.emplace_back(numbers_of(level, "levels"));
    return Martingale::from_levels(space, std::move(levels));
}

std::string serialize_decomposition(const AtomicDecomposition& dec) {
    std::string out = "{\"category\":" + std::to_string(static_cast<int>(dec.category));
    out += ",\"k_min\":" + std::to_string(dec.k_min);
    out += ",\"k_max\":" + std::to_string(dec.k_max);
    out += ",\"terms\":[";
    for (std::size_t i = 0; i < dec.terms.size(); ++i) {
        const auto& term = dec.terms[i];
        if (i > 0) out += ',';
        out += "{\"k\":" + std::to_string(term.k);
        out += ",\"theta\":" + format_number(term.theta);
        out += ",\"tau\":[";
        for (std::size_t w = 0; w < term.tau.values.size(); ++w) {
            if (w > 0) out += ',';
            const int t = term.tau.values[w];
            out += t == StoppingTime::kNever ? std::string("\"inf\"") : std::to_string(t);
        }
        out += "],\"atom\":";
        write_numbers(out, term.atom.values());
        out += '}';
    }
    out += "]}\n";
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace varhardy::io
