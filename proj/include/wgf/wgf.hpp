#pragma once

#include "wgf/bisection.hpp"
#include "wgf/diagnostics.hpp"
#include "wgf/dynamics.hpp"
#include "wgf/energetics.hpp"
#include "wgf/error.hpp"
#include "wgf/io.hpp"
#include "wgf/kernels.hpp"
#include "wgf/measures.hpp"
#include "wgf/parallel.hpp"
#include "wgf/particle_oracle.hpp"
#include "wgf/steady.hpp"
