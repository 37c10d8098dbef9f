#include "bilayer/errors.hpp"

namespace bilayer {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotInMe1: return "NotInMe1";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::InfiniteJumps: return "InfiniteJumps";
    case ErrorKind::UnsupportedClass: return "UnsupportedClass";
    case ErrorKind::WrongClass: return "WrongClass";
    case ErrorKind::IncompatibleComplex: return "IncompatibleComplex";
    case ErrorKind::NoRigidLayer: return "NoRigidLayer";
    case ErrorKind::BadAuxiliaryRotation: return "BadAuxiliaryRotation";
    case ErrorKind::BandOverflow: return "BandOverflow";
    case ErrorKind::RotationsNotGeneric: return "RotationsNotGeneric";
    case ErrorKind::ParallelJump: return "ParallelJump";
    case ErrorKind::NonParallelJump: return "NonParallelJump";
    case ErrorKind::CellsCollide: return "CellsCollide";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::PreconditionError: return "PreconditionError";
    case ErrorKind::BuildError: return "BuildError";
  }
  return "Unknown";
}

}  // namespace bilayer
