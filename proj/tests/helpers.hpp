#pragma once

#include <doctest.h>

#include <string>
#include <vector>

#include "aq/core.hpp"
#include "aq/error.hpp"

#define CHECK_AQ_ERROR(expr, ecode)                                   \
    do {                                                              \
        bool thrown_ = false;                                         \
        try {                                                         \
            (void)(expr);                                             \
        } catch (const aq::Error& e_) {                               \
            thrown_ = true;                                           \
            CHECK_MESSAGE(e_.code() == (ecode), e_.what());           \
        }                                                             \
        CHECK_MESSAGE(thrown_, "expected aq::Error from " #expr);     \
    } while (0)

namespace testutil {

inline aq::StationMeta station(std::string id, double lat, double lon,
                               aq::ActivityZone zone = aq::ActivityZone::Unclassified) {
    return {id, id, lat, lon, zone};
}

inline aq::Observation obs(std::string id, aq::Date date, aq::Pollutant p, double v) {
    aq::Observation o{std::move(id), date, {}};
    o.values[static_cast<std::size_t>(p)] = v;
    return o;
}

}  // namespace testutil
