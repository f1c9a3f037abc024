#pragma once

#include "fionf/errors.hpp"
#include "fionf/scalar.hpp"
#include "fionf/expmodel.hpp"
#include "fionf/monomial.hpp"
#include "fionf/matrix.hpp"
#include "fionf/jet.hpp"
#include "fionf/exppoly.hpp"
#include "fionf/frame.hpp"
#include "fionf/transport.hpp"
#include "fionf/symlin.hpp"
#include "fionf/homology.hpp"
#include "fionf/maplog.hpp"
#include "fionf/birkhoff.hpp"
#include "fionf/weylq.hpp"
#include "fionf/io.hpp"

namespace fionf {

inline constexpr const char* version = "0.1.0";

} // namespace fionf
