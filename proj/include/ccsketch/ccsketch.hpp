#pragma once

#include "bounds.hpp"
#include "config.hpp"
#include "entropy.hpp"
#include "errors.hpp"
#include "hash.hpp"
#include "montecarlo.hpp"
#include "serialize.hpp"
#include "sketch.hpp"
#include "stable_sampler.hpp"
#include "stream_io.hpp"
