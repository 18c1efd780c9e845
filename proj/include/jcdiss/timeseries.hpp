#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jcdiss/errors.hpp"

namespace jcdiss {

// A grid plus named real columns of the same length. The axis is the time in
// units of 1/g for trajectories and the coupling ratio for spectrum sweeps.
struct TimeSeries {
    std::string axis_name = "t_over_g";
    std::vector<double> axis;
    std::vector<std::pair<std::string, std::vector<double>>> columns;
    std::map<std::string, std::string> metadata;

    void add_column(std::string name, std::vector<double> values) {
        if (values.size() != axis.size())
            throw ValidationError("column '" + name + "' has " + std::to_string(values.size()) +
                                  " entries, axis has " + std::to_string(axis.size()));
        for (const auto& c : columns)
            if (c.first == name)
                throw ValidationError("duplicate column '" + name + "'");
        columns.emplace_back(std::move(name), std::move(values));
    }

    const std::vector<double>& column(const std::string& name) const {
        for (const auto& c : columns)
            if (c.first == name)
                return c.second;
        throw ValidationError("no column named '" + name + "'");
    }

    bool has_column(const std::string& name) const {
        for (const auto& c : columns)
            if (c.first == name)
                return true;
        return false;
    }
};

} // namespace jcdiss
