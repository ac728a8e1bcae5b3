#ifndef AMPNNSPL_AMPNNSPL_HPP
#define AMPNNSPL_AMPNNSPL_HPP

#include "ampnnspl/amp.hpp"
#include "ampnnspl/common.hpp"
#include "ampnnspl/denoiser.hpp"
#include "ampnnspl/io.hpp"
#include "ampnnspl/learning.hpp"
#include "ampnnspl/metrics.hpp"
#include "ampnnspl/model.hpp"
#include "ampnnspl/rng.hpp"
#include "ampnnspl/signals.hpp"
#include "ampnnspl/sweep.hpp"
#include "ampnnspl/topology.hpp"

#endif  // AMPNNSPL_AMPNNSPL_HPP
