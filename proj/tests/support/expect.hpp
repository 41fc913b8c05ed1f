#pragma once

#include "doctest.h"
#include "uef/common.hpp"

// Asserts that `expr` throws uef::Error with the given kind.
#define CHECK_ERROR_KIND(expr, kindv)                        \
    do {                                                     \
        bool caught_ = false;                                \
        try {                                                \
            (void)(expr);                                    \
        } catch (const uef::Error& e_) {                     \
            caught_ = true;                                  \
            CHECK(e_.kind() == (kindv));                     \
        }                                                    \
        CHECK_MESSAGE(caught_, "expected uef::Error from " #expr); \
    } while (0)
