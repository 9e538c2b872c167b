#include "fpls/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace fpls {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        std::size_t start = field.find_first_not_of(' ');
        fields.push_back(start == std::string::npos ? std::string() : field.substr(start));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line_no) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw CsvError(path.string() + ":" + std::to_string(line_no) +
                       ": cannot parse number '" + s + "'");
    return value;
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw CsvError(path.string() + ":1: empty file or missing header");

    const std::vector<std::string> header = split_csv_line(line);
    int y_col = -1;
    std::vector<int> x_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "y")
            y_col = static_cast<int>(c);
        else if (header[c].rfind("x_", 0) == 0)
            x_cols.push_back(static_cast<int>(c));
    }
    if (y_col < 0) throw CsvError(path.string() + ":1: missing required column 'y'");
    if (x_cols.size() < 2)
        throw CsvError(path.string() + ":1: need at least 2 x_* columns");

    std::vector<double> ys;
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw CsvError(path.string() + ":" + std::to_string(line_no) +
                           ": expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        ys.push_back(parse_double(fields[y_col], path, line_no));
        std::vector<double> row;
        row.reserve(x_cols.size());
        for (int c : x_cols) row.push_back(parse_double(fields[c], path, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2)
        throw CsvError(path.string() + ": need at least 2 observations, got " +
                       std::to_string(rows.size()));

    Grid grid = make_uniform_grid(static_cast<int>(x_cols.size()));
    Eigen::MatrixXd x(rows.size(), x_cols.size());
    Eigen::VectorXd y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        y[i] = ys[i];
        for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
    }
    return make_dataset(std::move(grid), std::move(x), std::move(y));
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    out << "y";
    char buf[16];
    for (int j = 0; j < dataset.grid.t_count; ++j) {
        std::snprintf(buf, sizeof buf, ",x_%03d", j);
        out << buf;
    }
    out << "\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < dataset.n(); ++i) {
        out << dataset.y[i];
        for (int j = 0; j < dataset.grid.t_count; ++j) out << ',' << dataset.x(i, j);
        out << "\n";
    }
}

FunctionVec read_function_csv(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw CsvError(path.string() + ":1: empty file");
    std::vector<double> values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw CsvError(path.string() + ":" + std::to_string(line_no) +
                           ": expected 't,value'");
        values.push_back(parse_double(fields[1], path, line_no));
    }
    if (static_cast<int>(values.size()) != grid.t_count)
        throw CsvError(path.string() + ": expected " + std::to_string(grid.t_count) +
                       " grid values, got " + std::to_string(values.size()));
    return FunctionVec(grid, Eigen::Map<Eigen::VectorXd>(values.data(), values.size()));
}

void write_function_csv(const std::filesystem::path& path, const FunctionVec& f) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    out.precision(17);
    out << "t,value\n";
    for (int k = 0; k < f.grid.t_count; ++k)
        out << f.grid.points[k] << ',' << f.values[k] << "\n";
}

void write_fit_trace_csv(const std::filesystem::path& path, const PlsFit& fit) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    out.precision(17);
    out << "m,residual_norm\n";
    for (std::size_t m = 0; m < fit.residual_norms.size(); ++m)
        out << m << ',' << fit.residual_norms[m] << "\n";
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw CsvError(path.string() + ":" + std::to_string(line_no) +
                           ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace fpls
