#include "admira/text_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "admira/error.hpp"

namespace admira {
namespace {

constexpr int kDigits = 17;

template <typename T>
T read_value(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw InvalidArgument(std::string("parse error: expected ") + what);
  return value;
}

void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j > 0) out << ' ';
    out << values[j];
  }
  out << '\n';
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(kDigits);
  return out;
}

}  // namespace

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

DenseMatrix read_matrix(std::istream& in) {
  const auto rows = read_value<std::size_t>(in, "row count");
  const auto cols = read_value<std::size_t>(in, "column count");
  std::vector<double> values(rows * cols);
  for (double& x : values) x = read_value<double>(in, "matrix entry");
  return DenseMatrix(rows, cols, std::move(values));
}

void write_factored(std::ostream& out, const FactoredMatrix& f) {
  out << f.rows() << ' ' << f.cols() << ' ' << f.rank() << '\n';
  for (std::size_t k = 0; k < f.rank(); ++k) {
    out << f.sigma(k) << '\n';
    write_row(out, f.u(k));
    write_row(out, f.v(k));
  }
}

FactoredMatrix read_factored(std::istream& in) {
  const auto rows = read_value<std::size_t>(in, "row count");
  const auto cols = read_value<std::size_t>(in, "column count");
  const auto rank = read_value<std::size_t>(in, "triplet count");
  AtomSet atoms(rows, cols);
  std::vector<double> sigmas(rank);
  std::vector<double> u(rows);
  std::vector<double> v(cols);
  for (std::size_t k = 0; k < rank; ++k) {
    sigmas[k] = read_value<double>(in, "sigma");
    for (double& x : u) x = read_value<double>(in, "u entry");
    for (double& x : v) x = read_value<double>(in, "v entry");
    atoms.push_back(u, v);
  }
  try {
    return FactoredMatrix(atoms, sigmas, true);
  } catch (const InvalidArgument&) {
    return FactoredMatrix(std::move(atoms), std::move(sigmas), false);
  }
}

void write_vector(std::ostream& out, std::span<const double> x) {
  out << x.size() << '\n';
  for (double value : x) out << value << '\n';
}

std::vector<double> read_vector(std::istream& in) {
  const auto n = read_value<std::size_t>(in, "vector length");
  std::vector<double> x(n);
  for (double& value : x) value = read_value<double>(in, "vector entry");
  return x;
}

void write_operator(std::ostream& out, const MeasurementOperator& op) {
  if (const auto* sampling = dynamic_cast<const SamplingOperator*>(&op)) {
    out << op.rows() << ' ' << op.cols() << ' ' << op.measurements() << '\n';
    for (std::size_t s = 0; s < op.measurements(); ++s) {
      const auto [i, j] = sampling->position(s);
      out << i + 1 << ' ' << j + 1 << '\n';
    }
    return;
  }
  if (const auto* gaussian = dynamic_cast<const GaussianOperator*>(&op)) {
    out << op.rows() << ' ' << op.cols() << ' ' << op.measurements() << ' ' << gaussian->seed()
        << '\n';
    return;
  }
  throw InvalidArgument("write_operator: operator type has no file representation");
}

std::unique_ptr<MeasurementOperator> read_operator(std::istream& in) {
  std::string header;
  while (header.find_first_not_of(" \t\r") == std::string::npos) {
    if (!std::getline(in, header)) throw InvalidArgument("parse error: empty operator file");
  }
  std::istringstream fields(header);
  std::vector<std::uint64_t> values;
  std::uint64_t value = 0;
  while (fields >> value) values.push_back(value);
  if (values.size() == 4) {
    return std::make_unique<GaussianOperator>(values[0], values[1], values[2], values[3]);
  }
  if (values.size() != 3) {
    throw InvalidArgument("parse error: operator header must be 'm n p' or 'm n p seed'");
  }
  const std::size_t p = values[2];
  std::vector<SamplingOperator::Index> positions(p);
  for (auto& [i, j] : positions) {
    const auto row = read_value<std::uint64_t>(in, "sample row");
    const auto col = read_value<std::uint64_t>(in, "sample column");
    if (row == 0 || col == 0 || row > values[0] || col > values[1]) {
      throw InvalidArgument("parse error: sample index out of range (indices are 1-based)");
    }
    i = static_cast<std::uint32_t>(row - 1);
    j = static_cast<std::uint32_t>(col - 1);
  }
  return std::make_unique<SamplingOperator>(values[0], values[1], positions);
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_matrix(out, m);
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

void save_factored(const std::filesystem::path& path, const FactoredMatrix& f) {
  auto out = open_out(path);
  write_factored(out, f);
}

FactoredMatrix load_factored(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_factored(in);
}

void save_vector(const std::filesystem::path& path, std::span<const double> x) {
  auto out = open_out(path);
  write_vector(out, x);
}

std::vector<double> load_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vector(in);
}

void save_operator(const std::filesystem::path& path, const MeasurementOperator& op) {
  auto out = open_out(path);
  write_operator(out, op);
}

std::unique_ptr<MeasurementOperator> load_operator(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_operator(in);
}

}  // namespace admira
