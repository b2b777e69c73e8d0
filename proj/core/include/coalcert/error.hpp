#pragma once

#include <stdexcept>
#include <string>

namespace coalcert {

class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: coalgebra documents, keys, formulas.
class parse_error : public error
{
public:
    using error::error;
};

// A coalgebra violates the invariants of its functor kind.
class model_error : public error
{
public:
    using error::error;
};

// 64-bit integer weights overflowed.
class arithmetic_error : public error
{
public:
    using error::error;
};

// Requested refinement mode does not fit the functor kind or the trace.
class mode_error : public error
{
public:
    using error::error;
};

class unknown_state_error : public error
{
public:
    using error::error;
};

// A formula uses a modality that has no meaning for the functor kind.
class kind_mismatch_error : public error
{
public:
    using error::error;
};

} // namespace coalcert
