#pragma once

// Umbrella header.
#include "epe/errors.hpp"
#include "epe/core.hpp"
#include "epe/mesh.hpp"
#include "epe/quadrature.hpp"
#include "epe/elements.hpp"
#include "epe/dof.hpp"
#include "epe/sparse.hpp"
#include "epe/assembly.hpp"
#include "epe/linalg.hpp"
#include "epe/fields.hpp"
#include "epe/mms.hpp"
#include "epe/schemes.hpp"
#include "epe/studies.hpp"
#include "epe/report.hpp"
#include "epe/vtk.hpp"
#include "epe/selfcheck.hpp"
