#ifndef FRACMV_FRACMV_HPP
#define FRACMV_FRACMV_HPP

#include "fracmv/asymptotics.hpp"
#include "fracmv/constants.hpp"
#include "fracmv/core.hpp"
#include "fracmv/fields.hpp"
#include "fracmv/frac_p.hpp"
#include "fracmv/grad_frac.hpp"
#include "fracmv/local_ops.hpp"
#include "fracmv/quadrature.hpp"

#endif // FRACMV_FRACMV_HPP
