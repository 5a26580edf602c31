#pragma once

#include <stdexcept>
#include <string>

namespace varkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation would need jet coordinates beyond the space's max_order.
struct CapacityError : Error {
    CapacityError(int needed, int max_order)
        : Error("jet order capacity exceeded: operation needs order " + std::to_string(needed) +
                " but the space holds max_order " + std::to_string(max_order)),
          needed_order(needed) {}
    int needed_order;
};

/// Source form of order > 2 passed to a second-order-only operator.
struct UnsupportedOrderError : Error {
    using Error::Error;
};

/// Input outside the representable fragment (e.g. non-polynomial fiber dependence).
struct UnsupportedInputError : Error {
    using Error::Error;
};

struct SpanError : Error {
    SpanError(const std::string& msg, int rank) : Error(msg), rank_achieved(rank) {}
    int rank_achieved;
};

/// d=1 resonance in the 1-D Lagrangian reconstruction (the L = -u_x ln u_x case).
struct ResonanceError : Error {
    using Error::Error;
};

/// dE/du_x not divisible by u_x in the 1-D reconstruction.
struct SmoothnessError : Error {
    using Error::Error;
};

/// Requested current density does not exist (input not a total divergence).
struct NoCurrentError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int line, int column)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line(line), column(column) {}
    int line;
    int column;
};

} // namespace varkit
