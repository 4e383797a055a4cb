#include "kpart/instance.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kpart/rng.hpp"

namespace kpart {

using nlohmann::json;

WeightedInstance::WeightedInstance(std::string name, int n, int k, std::vector<Weight> weights)
    : name_(std::move(name)), n_(n), k_(k), weights_(std::move(weights))
{
    if (n_ < 3)
        throw std::invalid_argument("instance needs n >= 3, got " + std::to_string(n_));
    if (k_ < 2 || k_ > n_ - 1)
        throw std::invalid_argument("instance needs 2 <= K <= n-1, got K=" + std::to_string(k_) +
                                    " for n=" + std::to_string(n_));
    if (static_cast<int>(weights_.size()) != edge_count(n_))
        throw std::invalid_argument("weight table has " + std::to_string(weights_.size()) +
                                    " entries, expected " + std::to_string(edge_count(n_)));
}

WeightedInstance WeightedInstance::with_k(int k) const
{
    return WeightedInstance(name_, n_, k, weights_);
}

WeightRange regime_range(Regime regime)
{
    switch (regime) {
    case Regime::D1: return {0, 500};
    case Regime::D2: return {-250, 250};
    case Regime::D3: return {-500, 0};
    }
    throw std::invalid_argument("unknown regime");
}

std::string regime_name(Regime regime)
{
    switch (regime) {
    case Regime::D1: return "d1";
    case Regime::D2: return "d2";
    case Regime::D3: return "d3";
    }
    throw std::invalid_argument("unknown regime");
}

Regime parse_regime(const std::string& text)
{
    if (text == "d1" || text == "D1") return Regime::D1;
    if (text == "d2" || text == "D2") return Regime::D2;
    if (text == "d3" || text == "D3") return Regime::D3;
    throw std::invalid_argument("unknown regime '" + text + "' (expected d1, d2 or d3)");
}

void DatasetSpec::validate() const
{
    if (count < 1) throw std::invalid_argument("dataset count must be positive");
    if (n_min < 3 || n_max < n_min) throw std::invalid_argument("invalid n range");
    if (k_min < 2 || k_max < k_min) throw std::invalid_argument("invalid K range");
    if (k_min > n_max - 1) throw std::invalid_argument("K range is empty for every n");
}

std::vector<Weight> generate_weights(Regime regime, std::uint64_t seed, int n, int index)
{
    const auto range = regime_range(regime);
    const std::uint64_t stream = (static_cast<std::uint64_t>(regime) << 48) ^
                                 (static_cast<std::uint64_t>(n) << 32) ^
                                 static_cast<std::uint64_t>(index);
    auto rng = make_stream(seed, stream);
    std::vector<Weight> weights(edge_count(n));
    for (auto& w : weights) w = uniform_int(rng, range.lo, range.hi);
    return weights;
}

std::vector<WeightedInstance> generate(const DatasetSpec& spec)
{
    spec.validate();
    std::vector<WeightedInstance> out;
    for (int n = spec.n_min; n <= spec.n_max; ++n) {
        for (int k = spec.k_min; k <= std::min(spec.k_max, n - 1); ++k) {
            for (int idx = 0; idx < spec.count; ++idx) {
                std::ostringstream name;
                name << regime_name(spec.regime) << "_n" << n << "_k" << k << "_i" << idx;
                out.emplace_back(name.str(), n, k, generate_weights(spec.regime, spec.seed, n, idx));
            }
        }
    }
    return out;
}

ParseError::ParseError(const std::string& what, int line, std::string field)
    : std::runtime_error(what), line_(line), field_(std::move(field))
{
}

std::string instance_to_json(const WeightedInstance& inst)
{
    // one edge per line keeps files diff-friendly
    std::ostringstream out;
    out << "{\n";
    out << "  \"name\": " << json(inst.name()).dump() << ",\n";
    out << "  \"n\": " << inst.n() << ",\n";
    out << "  \"k\": " << inst.k() << ",\n";
    out << "  \"weights\": [\n";
    const int n = inst.n();
    bool first = true;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            if (!first) out << ",\n";
            first = false;
            out << "    [" << i << ", " << j << ", " << inst.weight(i, j) << "]";
        }
    }
    out << "\n  ]\n}\n";
    return out.str();
}

namespace {

// Line of the first occurrence of `needle` at or after `from`; 0 if absent.
int line_of(const std::string& text, const std::string& needle, std::size_t from = 0)
{
    const auto pos = text.find(needle, from);
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

} // namespace

WeightedInstance instance_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; convert it to a line number
        const auto offset = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
        throw ParseError(std::string("malformed JSON: ") + e.what(), line, "");
    }
    if (!doc.is_object()) throw ParseError("instance must be a JSON object", 1, "");

    auto require = [&](const char* key) -> const json& {
        if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'", 0, key);
        return doc.at(key);
    };
    const auto& jn = require("n");
    const auto& jk = require("k");
    const auto& jw = require("weights");
    if (!jn.is_number_integer()) throw ParseError("field 'n' must be an integer", line_of(text, "\"n\""), "n");
    if (!jk.is_number_integer()) throw ParseError("field 'k' must be an integer", line_of(text, "\"k\""), "k");
    if (!jw.is_array()) throw ParseError("field 'weights' must be an array", line_of(text, "\"weights\""), "weights");
    std::string name;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ParseError("field 'name' must be a string", line_of(text, "\"name\""), "name");
        name = doc["name"].get<std::string>();
    }

    const int n = jn.get<int>();
    const int k = jk.get<int>();
    if (n < 3) throw ParseError("n must be >= 3", line_of(text, "\"n\""), "n");
    if (k < 2 || k > n - 1) throw ParseError("K must satisfy 2 <= K <= n-1", line_of(text, "\"k\""), "k");

    const int weights_line = line_of(text, "\"weights\"");
    std::vector<Weight> weights(edge_count(n));
    std::vector<bool> seen(weights.size(), false);
    for (std::size_t idx = 0; idx < jw.size(); ++idx) {
        const auto& entry = jw[idx];
        // entries are written one per line right after the "weights" key
        const int line = weights_line > 0 ? weights_line + 1 + static_cast<int>(idx) : 0;
        const std::string field = "weights[" + std::to_string(idx) + "]";
        if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number_integer() ||
            !entry[1].is_number_integer() || !entry[2].is_number_integer())
            throw ParseError(field + " must be an integer triple [i, j, w]", line, field);
        int i = entry[0].get<int>();
        int j = entry[1].get<int>();
        if (i == j || i < 1 || j < 1 || i > n || j > n)
            throw ParseError(field + " has invalid endpoints", line, field);
        const int pos = edge_position(n, i, j);
        if (seen[pos]) throw ParseError(field + " duplicates edge " + std::to_string(std::min(i, j)) + "-" +
                                            std::to_string(std::max(i, j)), line, field);
        seen[pos] = true;
        weights[pos] = entry[2].get<Weight>();
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (!seen[edge_position(n, i, j)])
                throw ParseError("missing edge " + std::to_string(i) + "-" + std::to_string(j), weights_line,
                                 "weights");
    return WeightedInstance(std::move(name), n, k, std::move(weights));
}

WeightedInstance read_instance(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return instance_from_json(buffer.str());
}

void write_instance(const WeightedInstance& inst, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file " + path.string());
    out << instance_to_json(inst);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

} // namespace kpart
