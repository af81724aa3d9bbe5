#pragma once

#include "mfchaos/cli.hpp"
#include "mfchaos/config.hpp"
#include "mfchaos/diagnostics.hpp"
#include "mfchaos/driver.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/experiments.hpp"
#include "mfchaos/fp_solver.hpp"
#include "mfchaos/grid.hpp"
#include "mfchaos/mollifier.hpp"
#include "mfchaos/parallel.hpp"
#include "mfchaos/particle_system.hpp"
#include "mfchaos/report.hpp"
#include "mfchaos/rng.hpp"
#include "mfchaos/wasserstein.hpp"
