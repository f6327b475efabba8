#pragma once

#include "matterwave/carrier.hpp"
#include "matterwave/dispersion.hpp"
#include "matterwave/envelope.hpp"
#include "matterwave/errors.hpp"
#include "matterwave/fft.hpp"
#include "matterwave/grid.hpp"
#include "matterwave/imaging.hpp"
#include "matterwave/lens.hpp"
#include "matterwave/units.hpp"
