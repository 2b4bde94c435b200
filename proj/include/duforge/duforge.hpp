// Umbrella header.

#pragma once

#include "duforge/cartan.hpp"
#include "duforge/core.hpp"
#include "duforge/ensemble.hpp"
#include "duforge/gates.hpp"
#include "duforge/io.hpp"
#include "duforge/maps.hpp"
#include "duforge/measures.hpp"
#include "duforge/rng.hpp"
#include "duforge/sampling.hpp"
#include "duforge/svd.hpp"
#include "duforge/tensor.hpp"
