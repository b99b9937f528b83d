#pragma once

#include <string>

#include <doctest.h>

#include "circuloop/core/error.hpp"

// Asserts that `expr` throws a DomainError carrying `code`.
#define CHECK_CODE(expr, code)                                                                   \
    do {                                                                                         \
        try {                                                                                    \
            (void)(expr);                                                                        \
            FAIL_CHECK("expected " << std::string(::circuloop::error_code_name(code)));          \
        } catch (const ::circuloop::DomainError& err_) {                                         \
            CHECK(std::string(err_.code_name()) == std::string(::circuloop::error_code_name(code))); \
        }                                                                                        \
    } while (0)
