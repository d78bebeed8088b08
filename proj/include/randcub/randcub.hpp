#pragma once

#include "randcub/cubature.hpp"
#include "randcub/experiment.hpp"
#include "randcub/induced_sampler.hpp"
#include "randcub/integrands.hpp"
#include "randcub/least_squares.hpp"
#include "randcub/linalg.hpp"
#include "randcub/multi_index.hpp"
#include "randcub/polynomial_family.hpp"
#include "randcub/quadrature.hpp"
#include "randcub/rng.hpp"
#include "randcub/sampling.hpp"
#include "randcub/tensor_basis.hpp"
