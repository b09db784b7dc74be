#pragma once

// Plain-text formats.
//
//   matrix:    "m n" then m lines of n values
//   factored:  "m n k" then k blocks of three lines: sigma, u (m values), v (n values)
//   vector:    "p" then p lines of one value
//   operator:  sampling "m n p" then p lines "i j" (1-indexed);
//              gaussian "m n p seed" (frames regenerated from the seed)

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "admira/linalg.hpp"
#include "admira/operators.hpp"

namespace admira {

void write_matrix(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& in);

void write_factored(std::ostream& out, const FactoredMatrix& f);
FactoredMatrix read_factored(std::istream& in);

void write_vector(std::ostream& out, std::span<const double> x);
std::vector<double> read_vector(std::istream& in);

/// Throws InvalidArgument for operators without a file representation.
void write_operator(std::ostream& out, const MeasurementOperator& op);
std::unique_ptr<MeasurementOperator> read_operator(std::istream& in);

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_matrix(const std::filesystem::path& path);
void save_factored(const std::filesystem::path& path, const FactoredMatrix& f);
FactoredMatrix load_factored(const std::filesystem::path& path);
void save_vector(const std::filesystem::path& path, std::span<const double> x);
std::vector<double> load_vector(const std::filesystem::path& path);
void save_operator(const std::filesystem::path& path, const MeasurementOperator& op);
std::unique_ptr<MeasurementOperator> load_operator(const std::filesystem::path& path);

}  // namespace admira
