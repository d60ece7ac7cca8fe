#include "bootlasso/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bootlasso/errors.hpp"

namespace bootlasso {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back("");
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError(path, 0, 0, "cannot open file");

    CsvTable table;
    std::string line;
    long line_no = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (table.columns.empty()) {
            table.columns = fields;
            if (table.columns.empty()) throw CsvParseError(path, line_no, 1, "empty header");
            continue;
        }
        if (fields.size() != table.columns.size())
            throw CsvParseError(path, line_no, static_cast<int>(fields.size()),
                                "expected " + std::to_string(table.columns.size()) +
                                    " fields, found " + std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (size_t c = 0; c < fields.size(); ++c) {
            const std::string& f = fields[c];
            double v = 0.0;
            auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw CsvParseError(path, line_no, static_cast<int>(c + 1),
                                    "cannot parse '" + f + "' as a number (column '" +
                                        table.columns[c] + "')");
            row[c] = v;
        }
        rows.push_back(std::move(row));
    }
    if (table.columns.empty()) throw CsvParseError(path, 0, 0, "missing header row");
    if (rows.empty()) throw CsvParseError(path, line_no, 0, "no data rows");

    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.columns.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t c = 0; c < rows[i].size(); ++c)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    return table;
}

LoadedDataset load_dataset_csv(const std::string& path, const std::string& response) {
    CsvTable table = read_csv(path);
    const auto it = std::find(table.columns.begin(), table.columns.end(), response);
    if (it == table.columns.end())
        throw CsvParseError(path, 1, 0, "response column '" + response + "' not found");
    const Eigen::Index resp = static_cast<Eigen::Index>(it - table.columns.begin());
    const Eigen::Index n = table.values.rows();
    const Eigen::Index p = table.values.cols() - 1;
    if (p < 1) throw CsvParseError(path, 1, 0, "no covariate columns besides the response");

    LoadedDataset out;
    out.response_name = response;
    Eigen::MatrixXd X(n, p);
    Eigen::Index jj = 0;
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
        if (j == resp) continue;
        X.col(jj) = table.values.col(j);
        out.covariate_names.push_back(table.columns[static_cast<size_t>(j)]);
        ++jj;
    }
    try {
        out.data = standardize(X, table.values.col(resp));
    } catch (const ConstantColumnError& e) {
        throw ConstantColumnError(e.column, out.covariate_names[static_cast<size_t>(e.column)]);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace bootlasso
