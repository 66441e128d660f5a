#pragma once

#include "mmqi/basis.hpp"
#include "mmqi/collective.hpp"
#include "mmqi/distinguishable.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/estimation.hpp"
#include "mmqi/farfield.hpp"
#include "mmqi/metrology.hpp"
#include "mmqi/one_body.hpp"
#include "mmqi/rng.hpp"
#include "mmqi/sparse_hermitian.hpp"
#include "mmqi/state.hpp"
#include "mmqi/states.hpp"
#include "mmqi/version.hpp"
