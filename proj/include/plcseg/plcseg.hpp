#ifndef PLCSEG_PLCSEG_HPP
#define PLCSEG_PLCSEG_HPP

#include <plcseg/catenary.hpp>
#include <plcseg/config.hpp>
#include <plcseg/corridor.hpp>
#include <plcseg/dbscan.hpp>
#include <plcseg/elevation_filter.hpp>
#include <plcseg/errors.hpp>
#include <plcseg/features.hpp>
#include <plcseg/io.hpp>
#include <plcseg/kdtree.hpp>
#include <plcseg/linalg.hpp>
#include <plcseg/parallel.hpp>
#include <plcseg/pipeline.hpp>
#include <plcseg/point_cloud.hpp>
#include <plcseg/random.hpp>
#include <plcseg/report.hpp>
#include <plcseg/segmentation.hpp>
#include <plcseg/synthgen.hpp>
#include <plcseg/tuner.hpp>

#endif // PLCSEG_PLCSEG_HPP
