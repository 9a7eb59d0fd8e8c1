// Umbrella header.
#pragma once

#include "config_io.hpp"
#include "design.hpp"
#include "freq.hpp"
#include "hb.hpp"
#include "model.hpp"
#include "reproduce.hpp"
#include "sim.hpp"
#include "waveform.hpp"
