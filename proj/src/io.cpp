#include "dlasso/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dlasso/errors.hpp"

namespace dlasso {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

}  // namespace

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
    auto out = open_out(path);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << ',';
        out << 'c' << j;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_vector_csv(const fs::path& path, const Eigen::VectorXd& v) {
    write_matrix_csv(path, v);
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV: " + path.string());
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("ragged CSV: " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

Eigen::VectorXd read_vector_csv(const fs::path& path) {
    const Eigen::MatrixXd m = read_matrix_csv(path);
    if (m.cols() != 1) throw IoError("expected single column in " + path.string());
    return m.col(0);
}

void write_table_csv(const fs::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    auto out = open_out(path);
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        out << header[j];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw IoError("table row width mismatch");
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
}

void write_dataset(const fs::path& dir, const Dataset& data) {
    fs::create_directories(dir);
    write_matrix_csv(dir / "X.csv", data.X);
    write_vector_csv(dir / "y.csv", data.y);
    json meta;
    meta["n"] = data.n();
    meta["p"] = data.p();
    meta["seed"] = data.seed;
    if (data.sigma) meta["sigma"] = *data.sigma;
    if (data.theta_star) {
        std::vector<double> t(data.theta_star->data(),
                              data.theta_star->data() + data.theta_star->size());
        meta["theta_star"] = t;
    }
    meta["X_path"] = "X.csv";
    meta["y_path"] = "y.csv";
    auto out = open_out(dir / "meta.json");
    out << meta.dump(2) << '\n';
}

Dataset read_dataset(const fs::path& meta_json) {
    auto in = open_in(meta_json);
    json meta = json::parse(in);
    const fs::path dir = meta_json.parent_path();
    Dataset d;
    d.X = read_matrix_csv(dir / meta.at("X_path").get<std::string>());
    d.y = read_vector_csv(dir / meta.at("y_path").get<std::string>());
    d.seed = meta.value("seed", 0ULL);
    if (meta.contains("sigma")) d.sigma = meta["sigma"].get<double>();
    if (meta.contains("theta_star")) {
        const auto t = meta["theta_star"].get<std::vector<double>>();
        d.theta_star = Eigen::Map<const Eigen::VectorXd>(t.data(),
                                                         static_cast<Eigen::Index>(t.size()));
    }
    if (d.X.rows() != static_cast<Eigen::Index>(meta.at("n").get<std::int64_t>()) ||
        d.X.cols() != static_cast<Eigen::Index>(meta.at("p").get<std::int64_t>()))
        throw IoError("envelope dimensions disagree with X.csv");
    if (d.y.size() != d.X.rows()) throw IoError("y length disagrees with X");
    return d;
}

}  // namespace dlasso
