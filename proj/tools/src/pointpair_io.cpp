#include "pointpair_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "far3/errors.hpp"

namespace far3::tools {

namespace {

struct Row {
    int line;
    std::vector<double> values;
};

std::vector<Row> read_rows(const std::string& path, std::initializer_list<int> allowed) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");

    std::vector<Row> rows;
    std::string raw;
    int line = 0;
    int columns = -1;
    while (std::getline(in, raw)) {
        ++line;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        for (char& ch : raw)
            if (ch == ',' || ch == '\t') ch = ' ';

        std::istringstream ss(raw);
        Row row{line, {}};
        std::string tok;
        while (ss >> tok) {
            char* end = nullptr;
            double v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size())
                throw ParseError(line, "invalid number '" + tok + "'");
            row.values.push_back(v);
        }
        if (row.values.empty()) continue;

        int got = static_cast<int>(row.values.size());
        if (columns < 0) {
            bool ok = false;
            for (int a : allowed) ok = ok || a == got;
            if (!ok) throw ParseError(line, "unexpected column count " + std::to_string(got));
            columns = got;
        } else if (got != columns) {
            throw ParseError(line, "expected " + std::to_string(columns) + " columns, got " +
                                       std::to_string(got));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(line, "no data rows in '" + path + "'");
    return rows;
}

}  // namespace

PointPairSet read_pair_file(const std::string& path) {
    auto rows = read_rows(path, {6, 7});
    PointPairSet pairs;
    for (const Row& row : rows) {
        const auto& v = row.values;
        pairs.reference_points.push_back({v[0], v[1], v[2]});
        pairs.body_points.push_back({v[3], v[4], v[5]});
        if (v.size() == 7) {
            if (v[6] <= 0.0) throw ParseError(row.line, "weight must be positive");
            pairs.weights.push_back(v[6]);
        }
    }
    return pairs;
}

std::vector<Vec3> read_cloud_file(const std::string& path) {
    auto rows = read_rows(path, {3});
    std::vector<Vec3> pts;
    pts.reserve(rows.size());
    for (const Row& row : rows)
        pts.push_back({row.values[0], row.values[1], row.values[2]});
    return pts;
}

}  // namespace far3::tools
