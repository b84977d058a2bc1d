#include "chipletplace/fields.hpp"

#include "chipletplace/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chiplet {

namespace {

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << data;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

} // namespace

std::string field_csv(const ScalarField& f) {
  std::ostringstream os;
  os << "x_mm,y_mm,z_layer,value\n";
  for (int z = 0; z < f.nz; ++z)
    for (int y = 0; y < f.ny; ++y)
      for (int x = 0; x < f.nx; ++x)
        os << fmt_g((x + 0.5) * f.dx) << ',' << fmt_g((y + 0.5) * f.dy) << ',' << z << ','
           << fmt_g(f.values[f.idx(x, y, z)]) << "\n";
  return os.str();
}

void write_field_csv(const ScalarField& f, const std::string& path) {
  write_file(path, field_csv(f));
}

std::string field_pgm(const ScalarField& f, int plane_z) {
  if (plane_z < 0 || plane_z >= f.nz) throw ValidationError("plane index out of range");
  double lo = f.values[f.idx(0, 0, plane_z)], hi = lo;
  for (int y = 0; y < f.ny; ++y) {
    for (int x = 0; x < f.nx; ++x) {
      double v = f.values[f.idx(x, y, plane_z)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  double span = hi - lo;
  std::ostringstream os;
  os << "P5\n" << f.nx << " " << f.ny << "\n255\n";
  for (int y = f.ny - 1; y >= 0; --y) { // top row = max y
    for (int x = 0; x < f.nx; ++x) {
      double v = f.values[f.idx(x, y, plane_z)];
      int g = span > 0.0 ? static_cast<int>(std::lround((v - lo) / span * 255.0)) : 0;
      os.put(static_cast<char>(std::clamp(g, 0, 255)));
    }
  }
  return os.str();
}

void write_field_pgm(const ScalarField& f, int plane_z, const std::string& path) {
  write_file(path, field_pgm(f, plane_z));
}

std::string route_csv(const RouteResult& r) {
  std::ostringstream os;
  os << "net,segment,x0_mm,y0_mm,x1_mm,y1_mm,wires\n";
  for (const NetRoute& net : r.nets) {
    int seg = 0;
    for (const RouteSegment& s : net.segments)
      os << net.src << "->" << net.dst << ',' << seg++ << ',' << fmt_g(s.x0) << ','
         << fmt_g(s.y0) << ',' << fmt_g(s.x1) << ',' << fmt_g(s.y1) << ',' << s.wires
         << "\n";
  }
  return os.str();
}

void write_route_csv(const RouteResult& r, const std::string& path) {
  write_file(path, route_csv(r));
}

} // namespace chiplet
