#pragma once

#include "geosubdiv/covering.hpp"
#include "geosubdiv/io.hpp"
#include "geosubdiv/karcher.hpp"
#include "geosubdiv/manifold.hpp"
#include "geosubdiv/mask.hpp"
#include "geosubdiv/schemes.hpp"
#include "geosubdiv/subdivision.hpp"
#include "geosubdiv/svg.hpp"
