#pragma once

#include <iosfwd>
#include <string>

#include "lvdiff/grid.hpp"

namespace lvdiff {

/// CSV with header "x,value" (1D) or "x,y,value" (2D), one row per node,
/// x-fastest order, 17 significant digits.
void write_field_csv(std::ostream& os, const ScalarField& f);
void write_field_csv(const std::string& path, const ScalarField& f);

/// Inverse of write_field_csv. The grid is inferred from the coordinates;
/// rows must be in x-fastest order on a uniform tensor grid starting at 0.
ScalarField read_field_csv(std::istream& is);
ScalarField read_field_csv(const std::string& path);

}  // namespace lvdiff
