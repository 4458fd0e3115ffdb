#pragma once

#include <stdexcept>
#include <string>

namespace hitt {

// one error vocabulary for the whole kernel; the driver turns these into
// report diagnostics, tests match on the kind.
enum class ErrKind {
  Mismatch,
  NotAFunction,
  NotAPair,
  NotAType,
  UnboundVariable,
  UnboundSchema,
  UnboundParam,
  ArityMismatch,
  IllTypedMotive,
  NegativeIndex,
  FuelExhausted,
  PositivityError,
  FibrantStructureError,
  BoundaryMismatch,
  SchemaError,
  InfiniteType,
  NonCanonical,
  CoherenceError,
  NotInitial,
  SyntaxError,
  ScopeError,
  IOError,
  Usage,
};

inline const char* err_kind_name(ErrKind k) {
  switch (k) {
    case ErrKind::Mismatch: return "Mismatch";
    case ErrKind::NotAFunction: return "NotAFunction";
    case ErrKind::NotAPair: return "NotAPair";
    case ErrKind::NotAType: return "NotAType";
    case ErrKind::UnboundVariable: return "UnboundVariable";
    case ErrKind::UnboundSchema: return "UnboundSchema";
    case ErrKind::UnboundParam: return "UnboundParam";
    case ErrKind::ArityMismatch: return "ArityMismatch";
    case ErrKind::IllTypedMotive: return "IllTypedMotive";
    case ErrKind::NegativeIndex: return "NegativeIndex";
    case ErrKind::FuelExhausted: return "FuelExhausted";
    case ErrKind::PositivityError: return "PositivityError";
    case ErrKind::FibrantStructureError: return "FibrantStructureError";
    case ErrKind::BoundaryMismatch: return "BoundaryMismatch";
    case ErrKind::SchemaError: return "SchemaError";
    case ErrKind::InfiniteType: return "InfiniteType";
    case ErrKind::NonCanonical: return "NonCanonical";
    case ErrKind::CoherenceError: return "CoherenceError";
    case ErrKind::NotInitial: return "NotInitial";
    case ErrKind::SyntaxError: return "SyntaxError";
    case ErrKind::ScopeError: return "ScopeError";
    case ErrKind::IOError: return "IOError";
    case ErrKind::Usage: return "Usage";
  }
  return "Unknown";
}

struct KernelError : std::runtime_error {
  ErrKind kind;
  KernelError(ErrKind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg) {
  throw KernelError(k, msg);
}

}  // namespace hitt
