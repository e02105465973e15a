#ifndef SCANLAW_ERRORS_HPP
#define SCANLAW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scanlaw {

// Machine-readable error codes. The CLI maps these to stable report codes,
// so renumbering is a breaking change.
enum class errc {
  schema = 1,            // malformed input spec / JSON
  degenerate = 2,        // zero-variance law, cannot standardize
  domain = 3,            // argument outside the mathematical domain
  capability = 4,        // operation not defined for this case/family
  rate_infinite = 5,     // I(s) = +inf requested (s >= s_inf)
  consistency = 6,       // internal identity violated beyond tolerance
  numeric = 7,           // solver / quadrature failed to converge
  precision = 8,         // requested precision not achievable (e.g. K too small)
  resource = 9,          // configuration too large for the requested policy
  argument = 10,         // generic bad argument (sizes, ordering)
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::schema: return "schema";
    case errc::degenerate: return "degenerate";
    case errc::domain: return "domain";
    case errc::capability: return "capability";
    case errc::rate_infinite: return "rate_infinite";
    case errc::consistency: return "consistency";
    case errc::numeric: return "numeric";
    case errc::precision: return "precision";
    case errc::resource: return "resource";
    case errc::argument: return "argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace scanlaw

#endif  // SCANLAW_ERRORS_HPP
