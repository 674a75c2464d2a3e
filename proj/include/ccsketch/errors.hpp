#pragma once

#include <stdexcept>
#include <string>

namespace ccsketch {

// Every failure raised by the library derives from ccsketch::error so callers
// (the CLI in particular) can map categories onto exit codes.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public error {
public:
    using error::error;
};

class index_error : public error {
public:
    using error::error;
};

class dimension_error : public error {
public:
    using error::error;
};

// Argument outside the mathematical domain of a function (theta outside
// (0, pi), t <= 0, epsilon >= 1 for the left tail, ...).
class domain_error : public error {
public:
    using error::error;
};

class invalid_input_error : public error {
public:
    using error::error;
};

// A bound or planner formula whose bracket denominator is not positive.
class infeasible_error : public error {
public:
    using error::error;
};

class no_root_error : public error {
public:
    using error::error;
};

class numeric_error : public error {
public:
    using error::error;
};

class degenerate_input_error : public error {
public:
    using error::error;
};

// min_j x_j <= 0: empty stream, non-strict-turnstile data or cancellation.
class non_positive_minimum_error : public error {
public:
    using error::error;
};

class incompatible_sketch_error : public error {
public:
    using error::error;
};

class format_error : public error {
public:
    using error::error;
};

// Final frequency went negative while materializing a stream.
class turnstile_violation_error : public error {
public:
    using error::error;
};

} // namespace ccsketch
