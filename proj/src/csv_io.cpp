#include "hdboot/csv_io.hpp"

#include "hdboot/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hdboot {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_series_csv(const std::filesystem::path& path, const TimeSeriesMatrix& x) {
  std::ofstream out = open_for_write(path);
  out << 't';
  for (Index j = 1; j <= x.d(); ++j) out << ",x" << j;
  out << '\n';
  for (Index i = 0; i < x.n(); ++i) {
    out << (i + 1);
    for (Index j = 0; j < x.d(); ++j) out << ',' << format_double(x.data()(i, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  bool drop_first_column = false;
  bool first_line = true;
  std::string line;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    std::vector<double> values;
    bool numeric = true;
    for (const auto& f : fields) {
      double v;
      if (!parse_double(f, v)) {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (first_line) {
      first_line = false;
      if (!numeric) {
        drop_first_column = !fields.empty() && fields.front() == "t";
        continue;
      }
    }
    if (!numeric) {
      throw InvalidArgument("non-numeric field in '" + path.string() + "': " + line);
    }
    if (drop_first_column) values.erase(values.begin());
    if (rows.empty()) width = values.size();
    if (values.size() != width || width == 0) {
      throw InvalidArgument("ragged row in '" + path.string() + "'");
    }
    rows.push_back(std::move(values));
  }
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return out;
}

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v) {
  std::ofstream out = open_for_write(path);
  for (Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_matrix_csv(path);
  require(m.cols() == 1, "'" + path.string() + "' must hold one value per line");
  return m.col(0);
}

}  // namespace hdboot
