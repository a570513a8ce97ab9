#include <doctest.h>

#include <algorithm>

#include "support/draft6_suite.hpp"

using namespace refnorm::testing;

TEST_CASE("official Draft-06 suite") {
  auto groups = run_draft6_suite(std::string(REFNORM_TEST_DATA) + "/draft6");
  auto manifest = read_unsupported_manifest(std::string(REFNORM_TEST_DATA) + "/draft6/UNSUPPORTED.tsv");
  std::sort(manifest.begin(), manifest.end());

  std::vector<std::string> rejected;
  int tests = 0;
  for (auto& g : groups) {
    if (!g.supported) {
      rejected.push_back(manifest_key(g));
      continue;
    }
    tests += g.tests;
    CHECK_MESSAGE(g.agreed == g.tests, g.file, ": ", g.description, " first miss: ",
                  g.disagreements.empty() ? "" : g.disagreements.front());
  }
  std::sort(rejected.begin(), rejected.end());
  // the manifest lists exactly what is rejected, nothing more
  CHECK(rejected == manifest);
  CHECK(tests > 500);
}
