#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "dlasso/designs.hpp"

namespace dlasso {

// RFC-4180 CSV, '.' decimal, LF line endings, header row c0..c{p-1}.
// Values are printed with %.17g so a write/read round trip is exact.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

// Generic table writer for report CSVs (same formatting contract).
void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

// Dataset envelope {n, p, seed, sigma, theta_star?, X_path, y_path}; the
// matrices live in the referenced CSV files next to the envelope.
void write_dataset(const std::filesystem::path& dir, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& meta_json);

std::string format_double(double v);

}  // namespace dlasso
