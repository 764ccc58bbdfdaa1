#pragma once

// Text serialization of lattice fields: a small self-describing header
// followed by one value per line in round-trip precision.

#include <gridfield/kernel.hpp>
#include <gridfield/likelihood.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace gridfield {

struct FieldFileHeader {
  int version = 1;
  int d = 1;
  int n = 2;
  double phi = 1.0;
  std::vector<double> thetas;
  std::uint64_t seed = 0;
  std::string ordering = "lexicographic-ascending";
};

void write_field(std::ostream& out, const LatticeField& field,
                 const ModelParams& params, std::uint64_t seed);
void write_field_file(const std::string& path, const LatticeField& field,
                      const ModelParams& params, std::uint64_t seed);

LatticeField read_field(std::istream& in, FieldFileHeader* header = nullptr);
LatticeField read_field_file(const std::string& path,
                             FieldFileHeader* header = nullptr);

}  // namespace gridfield
