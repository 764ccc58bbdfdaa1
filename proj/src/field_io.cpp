#include <gridfield/field_io.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gridfield {

namespace {

constexpr const char* kMagic = "gridfield-field";

std::string expect_line(std::istream& in, const std::string& tag) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("truncated field file");
  if (line.rfind(tag, 0) != 0 || line.size() <= tag.size() ||
      line[tag.size()] != ' ')
    throw std::runtime_error("malformed field file: expected '" + tag + "'");
  return line.substr(tag.size() + 1);
}

}  // namespace

void write_field(std::ostream& out, const LatticeField& field,
                 const ModelParams& params, std::uint64_t seed) {
  params.validate();
  if (params.d() != field.grid.d)
    throw std::invalid_argument("field / parameter dimension mismatch");
  if (field.values.size() != field.grid.size())
    throw std::invalid_argument("field length does not match grid");

  out << kMagic << " 1\n";
  out << "d " << field.grid.d << "\n";
  out << "n " << field.grid.n << "\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "phi " << params.phi << "\n";
  out << "theta";
  for (double t : params.thetas) out << ' ' << t;
  out << "\n";
  out << "seed " << seed << "\n";
  out << "ordering lexicographic-ascending\n";
  out << "values " << field.values.size() << "\n";
  for (double v : field.values) out << v << "\n";
  if (!out) throw std::runtime_error("field write failed");
}

void write_field_file(const std::string& path, const LatticeField& field,
                      const ModelParams& params, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(out, field, params, seed);
}

LatticeField read_field(std::istream& in, FieldFileHeader* header) {
  FieldFileHeader h;
  {
    std::istringstream ss(expect_line(in, kMagic));
    if (!(ss >> h.version) || h.version != 1)
      throw std::runtime_error("unsupported field file version");
  }
  h.d = std::stoi(expect_line(in, "d"));
  h.n = std::stoi(expect_line(in, "n"));
  h.phi = std::stod(expect_line(in, "phi"));
  {
    std::istringstream ss(expect_line(in, "theta"));
    double t;
    while (ss >> t) h.thetas.push_back(t);
  }
  h.seed = std::stoull(expect_line(in, "seed"));
  h.ordering = expect_line(in, "ordering");
  if (h.ordering != "lexicographic-ascending")
    throw std::runtime_error("unsupported value ordering: " + h.ordering);
  std::size_t count = std::stoull(expect_line(in, "values"));

  if (h.d < 1 || h.n < 2 || int(h.thetas.size()) != h.d)
    throw std::runtime_error("inconsistent field file header");

  LatticeField field;
  field.grid.n = h.n;
  field.grid.d = h.d;
  if (count != field.grid.size())
    throw std::runtime_error("value count does not match grid");
  field.values.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    if (!(in >> field.values[k]))
      throw std::runtime_error("truncated field values");
  if (header) *header = h;
  return field;
}

LatticeField read_field_file(const std::string& path, FieldFileHeader* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_field(in, header);
}

}  // namespace gridfield
