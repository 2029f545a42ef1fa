#pragma once

#include "del/cam.hpp"
#include "del/clipping.hpp"
#include "del/evaluation.hpp"
#include "del/footprint.hpp"
#include "del/geodesy.hpp"
#include "del/geometry.hpp"
#include "del/homography.hpp"
#include "del/io.hpp"
#include "del/labels.hpp"
#include "del/pipeline.hpp"
#include "del/plane_align.hpp"
#include "del/reconstruction.hpp"
#include "del/synth.hpp"
