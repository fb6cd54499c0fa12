#pragma once

// Umbrella header.

#include "impdelay/certificate.hpp"
#include "impdelay/core.hpp"
#include "impdelay/errors.hpp"
#include "impdelay/integrator.hpp"
#include "impdelay/io.hpp"
#include "impdelay/linalg.hpp"
#include "impdelay/lyapunov.hpp"
#include "impdelay/presets.hpp"
#include "impdelay/schedule.hpp"
#include "impdelay/term_system.hpp"
