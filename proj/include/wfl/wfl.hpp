#pragma once

#include "wfl/core.hpp"
#include "wfl/cutoff.hpp"
#include "wfl/detector.hpp"
#include "wfl/fft.hpp"
#include "wfl/field_io.hpp"
#include "wfl/grid.hpp"
#include "wfl/hamiltonian_flow.hpp"
#include "wfl/parallel.hpp"
#include "wfl/potential.hpp"
#include "wfl/propagator.hpp"
#include "wfl/spectral.hpp"
#include "wfl/transport_check.hpp"
#include "wfl/version.hpp"
#include "wfl/wavepacket.hpp"
#include "wfl/experiments/config.hpp"
#include "wfl/experiments/initial_data.hpp"
#include "wfl/experiments/presets.hpp"
#include "wfl/experiments/report.hpp"
#include "wfl/experiments/scenarios.hpp"
