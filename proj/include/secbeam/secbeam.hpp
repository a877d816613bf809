#ifndef SECBEAM_SECBEAM_HPP
#define SECBEAM_SECBEAM_HPP

#include "secbeam/barrier.hpp"
#include "secbeam/cccp.hpp"
#include "secbeam/dc_transform.hpp"
#include "secbeam/experiments.hpp"
#include "secbeam/linalg.hpp"
#include "secbeam/model.hpp"
#include "secbeam/montecarlo.hpp"
#include "secbeam/oma.hpp"
#include "secbeam/random.hpp"
#include "secbeam/subproblem.hpp"

#endif // SECBEAM_SECBEAM_HPP
