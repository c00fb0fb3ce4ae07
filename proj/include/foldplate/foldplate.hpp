// Umbrella header for the foldplate library.

#ifndef FOLDPLATE_FOLDPLATE_HPP
#define FOLDPLATE_FOLDPLATE_HPP

#include "foldplate/analysis.hpp"
#include "foldplate/assembly.hpp"
#include "foldplate/experiment.hpp"
#include "foldplate/isoparametric.hpp"
#include "foldplate/manufactured.hpp"
#include "foldplate/mesh.hpp"
#include "foldplate/quadrature.hpp"
#include "foldplate/reference_basis.hpp"
#include "foldplate/solver.hpp"
#include "foldplate/space.hpp"
#include "foldplate/types.hpp"
#include "foldplate/vtk.hpp"

#endif
