#pragma once

#include <stdexcept>
#include <string>

namespace bilayer {

enum class ErrorKind {
  InvalidInput,
  NotInMe1,
  DomainMismatch,
  InfiniteJumps,
  UnsupportedClass,
  WrongClass,
  IncompatibleComplex,
  NoRigidLayer,
  BadAuxiliaryRotation,
  BandOverflow,
  RotationsNotGeneric,
  ParallelJump,
  NonParallelJump,
  CellsCollide,
  ParseError,
  PreconditionError,
  BuildError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bilayer
