#ifndef ARCSIN_ARCSIN_HPP
#define ARCSIN_ARCSIN_HPP

// Umbrella header.

#include "arcsin/baselines.hpp"
#include "arcsin/bounds.hpp"
#include "arcsin/config.hpp"
#include "arcsin/core.hpp"
#include "arcsin/errors.hpp"
#include "arcsin/experiment.hpp"
#include "arcsin/injector.hpp"
#include "arcsin/io.hpp"
#include "arcsin/probe.hpp"
#include "arcsin/report.hpp"
#include "arcsin/rng.hpp"
#include "arcsin/scenario.hpp"
#include "arcsin/version.hpp"

#endif  // ARCSIN_ARCSIN_HPP
