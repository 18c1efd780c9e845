#include <chrono>
#include <cstdlib>
#include <ctime>
#include <ostream>

#include <json.hpp>

#include "jcdiss/repro.hpp"

namespace jcdiss {

namespace {

std::string ratio_tag(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", r);
    return buf;
}

// UTC ISO-8601; SOURCE_DATE_EPOCH pins it for reproducible output.
std::string generation_time() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (end && *end == '\0' && end != epoch)
            t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

TimeSeries merge_series(const std::vector<TimeSeries>& series, const std::vector<double>& ratios) {
    if (series.empty())
        throw ValidationError("merge_series: nothing to merge");
    if (series.size() == 1)
        return series.front();
    if (series.size() != ratios.size())
        throw ValidationError("merge_series: one ratio per series is required");
    TimeSeries out;
    out.axis_name = series.front().axis_name;
    out.axis = series.front().axis;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].axis != out.axis)
            throw ValidationError("merge_series: series have different grids");
        const std::string suffix = "_r" + ratio_tag(ratios[i]);
        for (const auto& [name, values] : series[i].columns)
            out.add_column(name + suffix, values);
        for (const auto& [key, value] : series[i].metadata)
            out.metadata["r" + ratio_tag(ratios[i]) + "." + key] = value;
    }
    return out;
}

void write_csv(std::ostream& os, const TimeSeries& table, const RunConfig& cfg) {
    os << "# jcdiss " << JCDISS_VERSION << '\n';
    for (const auto& [k, v] : cfg.echo())
        os << "# config." << k << " = " << v << '\n';
    for (const auto& [k, v] : table.metadata)
        os << "# meta." << k << " = " << v << '\n';
    os << table.axis_name;
    for (const auto& c : table.columns)
        os << ',' << c.first;
    os << '\n';
    for (std::size_t i = 0; i < table.axis.size(); ++i) {
        os << format_double(table.axis[i]);
        for (const auto& c : table.columns)
            os << ',' << format_double(c.second[i]);
        os << '\n';
    }
}

void write_json(std::ostream& os, const TimeSeries& table, const RunConfig& cfg) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.echo())
        config[k] = v;
    doc["config"] = config;
    nlohmann::ordered_json columns = nlohmann::ordered_json::object();
    columns[table.axis_name] = table.axis;
    for (const auto& [name, values] : table.columns)
        columns[name] = values;
    doc["columns"] = columns;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : table.metadata)
        meta[k] = v;
    doc["metadata"] = meta;
    doc["provenance"] = {{"tool", "jcdiss"}, {"version", JCDISS_VERSION}, {"generated_at", generation_time()}};
    os << doc.dump(2) << '\n';
}

} // namespace jcdiss
