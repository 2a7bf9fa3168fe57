#pragma once

#include "xxlseg/components.hpp"
#include "xxlseg/eval.hpp"
#include "xxlseg/fusion.hpp"
#include "xxlseg/instancer.hpp"
#include "xxlseg/morphology.hpp"
#include "xxlseg/parallel.hpp"
#include "xxlseg/phantom.hpp"
#include "xxlseg/preprocess.hpp"
#include "xxlseg/segments.hpp"
#include "xxlseg/slice_stack.hpp"
#include "xxlseg/tiling.hpp"
#include "xxlseg/version.hpp"
#include "xxlseg/volume.hpp"
#include "xxlseg/volume_io.hpp"
