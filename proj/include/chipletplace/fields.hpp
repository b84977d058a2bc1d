#ifndef CHIPLETPLACE_FIELDS_HPP
#define CHIPLETPLACE_FIELDS_HPP

// Field export formats: per-cell CSV (x_mm, y_mm, z_layer, value) and an
// 8-bit binary PGM per horizontal plane (min-max normalized, row-major,
// top row = max y).

#include "chipletplace/router.hpp"
#include "chipletplace/thermal.hpp"

#include <string>

namespace chiplet {

std::string field_csv(const ScalarField& f);
void write_field_csv(const ScalarField& f, const std::string& path);

std::string field_pgm(const ScalarField& f, int plane_z);
void write_field_pgm(const ScalarField& f, int plane_z, const std::string& path);

std::string route_csv(const RouteResult& r);
void write_route_csv(const RouteResult& r, const std::string& path);

} // namespace chiplet

#endif
