#ifndef SLOWLIGHT_SLOWLIGHT_HPP
#define SLOWLIGHT_SLOWLIGHT_HPP

#include "slowlight/envelope.hpp"
#include "slowlight/fft.hpp"
#include "slowlight/fock.hpp"
#include "slowlight/medium.hpp"
#include "slowlight/propagation.hpp"
#include "slowlight/quantum.hpp"
#include "slowlight/run.hpp"
#include "slowlight/scenario.hpp"
#include "slowlight/table.hpp"

#endif
