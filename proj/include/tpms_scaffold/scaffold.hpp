#pragma once

#include "analysis.hpp"
#include "bspline.hpp"
#include "error.hpp"
#include "io.hpp"
#include "mapper.hpp"
#include "mesh.hpp"
#include "parallel.hpp"
#include "polygonizer.hpp"
#include "shapes.hpp"
#include "tdf_builder.hpp"
#include "tensor_grid.hpp"
#include "tpms.hpp"
#include "vec3.hpp"
