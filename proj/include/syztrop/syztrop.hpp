#pragma once

#include "syztrop/error.hpp"
#include "syztrop/fibration.hpp"
#include "syztrop/io.hpp"
#include "syztrop/laurent.hpp"
#include "syztrop/lg.hpp"
#include "syztrop/linprog.hpp"
#include "syztrop/mirror.hpp"
#include "syztrop/novikov.hpp"
#include "syztrop/prng.hpp"
#include "syztrop/rational.hpp"
#include "syztrop/toric.hpp"
#include "syztrop/tropical.hpp"
