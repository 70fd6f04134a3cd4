#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "landslide/grid.hpp"

namespace landslide {

// One output band of a composite: either a source band picked verbatim or
// an after-minus-before difference of two source bands.
struct BandExpr {
    enum class Kind { Select, Difference };
    Kind kind = Kind::Select;
    std::string band;    // Select
    std::string after;   // Difference: after - before
    std::string before;

    std::string name() const {
        return kind == Kind::Select ? band : after + "-" + before;
    }
};

// A named 3-band stacking rule. The nine built-in recipes map dataset names
// to band expressions:
//
//   RGB  Red        Green     Blue
//   SSD  VV_after   VH_after  DEM
//   SSS  VV_after   VH_after  Slope
//   BAD  VV_before  VV_after  DEM
//   BAS  VV_before  VV_after  Slope
//   HHH  VH_before  VH_after  VH_after
//   BAA  VV_before  VV_after  VV_after
//   BAC  VV_before  VV_after  VV_after - VV_before
//   BAH  VV_before  VV_after  VH_after
struct CompositeRecipe {
    std::string name;
    std::array<BandExpr, 3> bands;
};

// Built-in recipe table, in the order above.
const std::vector<CompositeRecipe>& all_recipes();
const CompositeRecipe& recipe_by_name(const std::string& name);

// Single-band source grids keyed by symbol (VV_before, VV_after, VH_before,
// VH_after, DEM, Slope, Red, Green, Blue).
using SourceMap = std::map<std::string, Grid>;

// Evaluates the recipe pixelwise over the sources. All referenced bands must
// exist and share shape and geotransform. Output band names record
// provenance.
Grid compose(const CompositeRecipe& recipe, const SourceMap& sources);

}  // namespace landslide
