// One line per acceptance criterion; exit status is non-zero if any fails.
#include <cstdio>
#include <string>
#include <vector>

#include "fj/checkpoints.hpp"
#include "fj/io.hpp"

namespace {

struct Criterion {
  const char* name;
  const char* prefix;  // checkpoint ids starting with this belong to it
};

const Criterion kCriteria[] = {
    {"Bessel fidelity", "bessel."},
    {"Spectrum oracle", "spectrum.oracle"},
    {"Monodromy agreement", "spectrum.monodromy"},
    {"Hermitian norm conservation", "norm."},
    {"Figure 1 triptych", "dynamics."},
    {"Boundary identities", "boundary."},
    {"Unbalanced equilibrium derivations", "equilibrium."},
    {"Asymptotic totals", "asymptotic."},
    {"CDT/decay split", "cdt."},
    {"Scan topology", "scan."},
};

std::string summary(const fj::CheckResult& r) {
  std::string s = r.id + "=" + fj::io::format_number(r.measured);
  if (r.tolerance > 0.0) {
    s += " (want " + fj::io::format_number(r.expected) + " +- " + fj::io::format_number(r.tolerance) + ")";
  }
  return s;
}

}  // namespace

int main() {
  const auto results = fj::run_figure_suite();
  int failed = 0;
  for (const auto& c : kCriteria) {
    const std::string prefix = c.prefix;
    int total = 0;
    int passed = 0;
    std::string detail;
    for (const auto& r : results) {
      if (r.id.rfind(prefix, 0) != 0) continue;
      ++total;
      if (r.passed) {
        ++passed;
      } else {
        detail += (detail.empty() ? "" : "; ") + summary(r);
      }
    }
    const bool ok = total > 0 && passed == total;
    if (!ok) ++failed;
    std::printf("%s  %-36s %d/%d%s%s\n", ok ? "PASS" : "FAIL", c.name, passed, total,
                detail.empty() ? "" : "  ", detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(kCriteria)) - failed,
              std::size(kCriteria));
  return failed == 0 ? 0 : 1;
}
