#include "tsir/errors.hpp"

namespace tsir {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::DomainEmpty: return "domain-empty";
    case Errc::InvalidEndpoint: return "invalid-endpoint";
    case Errc::AccumulationPoint: return "accumulation-point";
    case Errc::NotInDomain: return "not-in-domain";
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::Nonregressive: return "nonregressive";
    case Errc::Overflow: return "overflow";
    case Errc::WrongDomain: return "wrong-domain";
    case Errc::InvalidInitial: return "invalid-initial";
    case Errc::DegenerateState: return "degenerate-state";
    case Errc::ConservationViolated: return "conservation-violated";
    case Errc::Parse: return "parse";
    case Errc::Semantic: return "semantic";
    case Errc::Io: return "io";
  }
  return "unknown";
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::Parse:
    case Errc::Semantic:
      return 1;
    case Errc::Io:
      return 3;
    default:
      return 2;
  }
}

}  // namespace tsir
