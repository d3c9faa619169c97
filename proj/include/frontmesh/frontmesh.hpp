#pragma once

// Everything in one include.

#include "frontmesh/delaunay2d.hpp"
#include "frontmesh/direction_field.hpp"
#include "frontmesh/errors.hpp"
#include "frontmesh/fixtures.hpp"
#include "frontmesh/frontal_insertion.hpp"
#include "frontmesh/hilbert.hpp"
#include "frontmesh/mesh_core.hpp"
#include "frontmesh/mesh_io.hpp"
#include "frontmesh/pipeline.hpp"
#include "frontmesh/predicates.hpp"
#include "frontmesh/quad_quality.hpp"
#include "frontmesh/recombine.hpp"
#include "frontmesh/size_field.hpp"
#include "frontmesh/topo_mesh.hpp"
#include "frontmesh/triangulator.hpp"
#include "frontmesh/vec3.hpp"
