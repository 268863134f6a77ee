#pragma once

// Radial comparison minimizers and dead-core structure of semilinear
// elliptic energies with nonsmooth potentials, plus lattice minimizers and
// the diagnostic checks that verify the comparison bound, the dead-core
// thresholds, the bulk/shell integral identity, and the maximum principle
// on desk-scale instances.

#include "deadcore/commands.hpp"
#include "deadcore/config.hpp"
#include "deadcore/diagnostics.hpp"
#include "deadcore/dp_solver.hpp"
#include "deadcore/errors.hpp"
#include "deadcore/field_solver.hpp"
#include "deadcore/lattice.hpp"
#include "deadcore/oracles.hpp"
#include "deadcore/potential.hpp"
#include "deadcore/quadrature.hpp"
#include "deadcore/radial.hpp"
#include "deadcore/serialize.hpp"
