#pragma once

#include <cspprune/arc_consistency.hpp>
#include <cspprune/catalog.hpp>
#include <cspprune/engine.hpp>
#include <cspprune/fixtures.hpp>
#include <cspprune/io.hpp>
#include <cspprune/model.hpp>
#include <cspprune/oracle.hpp>
#include <cspprune/pattern_algebra.hpp>
#include <cspprune/reconstruction.hpp>
#include <cspprune/trace.hpp>
