#pragma once

#include "ogc/agents.hpp"
#include "ogc/curriculum.hpp"
#include "ogc/env.hpp"
#include "ogc/generator.hpp"
#include "ogc/harness.hpp"
#include "ogc/io.hpp"
#include "ogc/layouts.hpp"
#include "ogc/level.hpp"
#include "ogc/mutator.hpp"
#include "ogc/rng.hpp"
#include "ogc/teacher.hpp"
