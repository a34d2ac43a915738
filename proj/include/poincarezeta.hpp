#pragma once

#include "poincarezeta/core/linalg.hpp"
#include "poincarezeta/core/parallel.hpp"
#include "poincarezeta/core/types.hpp"
#include "poincarezeta/io/csv.hpp"
#include "poincarezeta/io/oqmx.hpp"
#include "poincarezeta/phase_flow/escape.hpp"
#include "poincarezeta/phase_flow/hamiltonian.hpp"
#include "poincarezeta/phase_flow/integrator.hpp"
#include "poincarezeta/poincare/return_map.hpp"
#include "poincarezeta/poincare/section.hpp"
#include "poincarezeta/poincare/three_bump.hpp"
#include "poincarezeta/quantum/baker.hpp"
#include "poincarezeta/quantum/open_map.hpp"
#include "poincarezeta/quantum/poisson.hpp"
#include "poincarezeta/quantum/torus.hpp"
#include "poincarezeta/quantum/transfer.hpp"
#include "poincarezeta/scaling/complex_scaling.hpp"
#include "poincarezeta/spectral/grushin.hpp"
#include "poincarezeta/spectral/parametrix.hpp"
#include "poincarezeta/spectral/quadrature.hpp"
#include "poincarezeta/spectral/resonances.hpp"
#include "poincarezeta/spectral/selftest.hpp"
#include "poincarezeta/spectral/zeta.hpp"
