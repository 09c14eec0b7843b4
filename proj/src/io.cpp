#include "hqm/io.hpp"

#include <cstring>
#include <fstream>

#include "hqm/errors.hpp"

#include "json.hpp"

namespace hqm {

namespace {

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double read_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_header(std::ofstream& out, const Grid& g, int rank) {
  write_u64(out, static_cast<std::uint64_t>(g.dim()));
  write_u64(out, static_cast<std::uint64_t>(rank));
  for (int a = 0; a < g.dim(); ++a) write_u64(out, static_cast<std::uint64_t>(g.res(a)));
  for (int a = 0; a < g.dim(); ++a) {
    write_f64(out, g.lo(a));
    write_f64(out, g.hi(a));
  }
}

void write_sidecar(const std::string& path, const Grid& g, int rank) {
  nlohmann::ordered_json j;
  j["dim"] = g.dim();
  j["rank"] = rank;
  j["resolution"] = g.res();
  nlohmann::ordered_json ext = nlohmann::ordered_json::array();
  for (int a = 0; a < g.dim(); ++a) ext.push_back({g.lo(a), g.hi(a)});
  j["extents"] = ext;
  j["periodic"] = g.periodic();
  j["samples_per_component"] = g.size();
  std::ofstream out(path + ".json");
  require(out.good(), ErrorKind::Io, "cannot write sidecar for " + path);
  out << j.dump(2) << "\n";
}

void write_samples(std::ofstream& out, const ScalarField& f) {
  for (const Cx& z : f.data()) {
    write_f64(out, z.real());
    write_f64(out, z.imag());
  }
}

void read_samples(std::ifstream& in, ScalarField& f) {
  for (Cx& z : f.data()) {
    const double re = read_f64(in);
    const double im = read_f64(in);
    z = {re, im};
  }
}

Grid read_header(std::ifstream& in, const std::string& path, int expected_rank) {
  const auto dim = static_cast<int>(read_u64(in));
  const auto rank = static_cast<int>(read_u64(in));
  require(rank == expected_rank, ErrorKind::Io,
          "rank mismatch loading " + path);
  std::vector<int> res(dim);
  for (int a = 0; a < dim; ++a) res[a] = static_cast<int>(read_u64(in));
  std::vector<double> lo(dim), hi(dim);
  for (int a = 0; a < dim; ++a) {
    lo[a] = read_f64(in);
    hi[a] = read_f64(in);
  }
  require(in.good(), ErrorKind::Io, "truncated header in " + path);
  bool periodic = false;
  std::ifstream side(path + ".json");
  if (side.good()) {
    nlohmann::json j;
    side >> j;
    periodic = j.value("periodic", false);
  }
  return Grid(std::move(lo), std::move(hi), std::move(res), periodic);
}

}  // namespace

void save_field(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::Io, "cannot open " + path);
  write_header(out, f.grid(), 0);
  write_samples(out, f);
  write_sidecar(path, f.grid(), 0);
}

void save_field(const std::string& path, const Tensor3Field& f) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::Io, "cannot open " + path);
  write_header(out, f.grid(), 3);
  const int d = f.dim();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) write_samples(out, f.comp(j, k, l));
  write_sidecar(path, f.grid(), 3);
}

ScalarField load_scalar_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + path);
  Grid g = read_header(in, path, 0);
  ScalarField f(g);
  read_samples(in, f);
  require(in.good(), ErrorKind::Io, "truncated samples in " + path);
  return f;
}

Tensor3Field load_tensor3_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + path);
  Grid g = read_header(in, path, 3);
  Tensor3Field f(g);
  const int d = f.dim();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) read_samples(in, f.comp(j, k, l));
  require(in.good(), ErrorKind::Io, "truncated samples in " + path);
  return f;
}

}  // namespace hqm
