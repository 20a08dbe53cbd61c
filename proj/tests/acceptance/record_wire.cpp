// SPDX-License-Identifier: Apache-2.0
//
// Prints one JSON object per line: {"service", "request", "response"} for every
// endpoint, as produced by the stub through the server-side dispatcher.
#include <iostream>

#include "fixtures.hpp"

int main() {
  for (const auto& ex : groundseq::fixtures::wire_exchanges()) {
    const groundseq::json line = {{"service", groundseq::gateway::service_name(ex.service)},
                                  {"request", ex.request},
                                  {"response", ex.response}};
    std::cout << line.dump() << '\n';
  }
}
