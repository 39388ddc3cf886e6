#pragma once

// Physics core. The experiment harness lives under transducer/harness/.
#include "transducer/constants.hpp"
#include "transducer/errors.hpp"
#include "transducer/mechanics.hpp"
#include "transducer/circuit.hpp"
#include "transducer/coupling.hpp"
#include "transducer/dynamics.hpp"
