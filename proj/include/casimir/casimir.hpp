/**
 * @file casimir.hpp
 * @brief Umbrella header.
 */
#ifndef CASIMIR_CASIMIR_HPP
#define CASIMIR_CASIMIR_HPP

#include "born/kernel.hpp"
#include "born/scattering.hpp"
#include "born/voxel_body.hpp"
#include "closed_forms.hpp"
#include "criteria.hpp"
#include "error.hpp"
#include "gamma_provider.hpp"
#include "io/kv_parser.hpp"
#include "io/scene.hpp"
#include "io/table.hpp"
#include "materials.hpp"
#include "numerics/bessel.hpp"
#include "numerics/interp.hpp"
#include "numerics/matsubara.hpp"
#include "numerics/quadrature.hpp"
#include "sweep.hpp"
#include "thermal.hpp"
#include "units.hpp"

#endif
