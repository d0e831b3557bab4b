#ifndef GAUSSCJ_GAUSSCJ_HPP
#define GAUSSCJ_GAUSSCJ_HPP

// Umbrella header: the whole library.

#include "gausscj/cj_core.hpp"
#include "gausscj/ebreak.hpp"
#include "gausscj/fock_oracle.hpp"
#include "gausscj/gauss_cj.hpp"
#include "gausscj/matkernel.hpp"
#include "gausscj/spec_io.hpp"
#include "gausscj/symplectic.hpp"
#include "gausscj/types.hpp"

#endif
