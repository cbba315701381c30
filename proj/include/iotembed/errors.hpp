// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace iotembed {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No admissible path between two hosts.
struct NoRouteError : Error {
  NoRouteError(int src_, int dst_, const std::string& why)
      : Error("no route from node " + std::to_string(src_) + " to node " +
              std::to_string(dst_) + ": " + why),
        src(src_),
        dst(dst_) {}
  int src;
  int dst;
};

// A demand could not be routed even at full node capacity.
struct BlockedError : Error {
  BlockedError(int bp_, int vlink_, const std::string& why)
      : Error("demand bp " + std::to_string(bp_) + " vlink " + std::to_string(vlink_) +
              " blocked: " + why),
        bp(bp_),
        vlink(vlink_) {}
  int bp;
  int vlink;
};

// M/M/1 utilisation at or beyond 1 (arrival has no lookup-table entry).
struct SaturationError : Error {
  SaturationError(int node_, double arrival_kbps_)
      : Error("node " + std::to_string(node_) + " saturated: arrival " +
              std::to_string(arrival_kbps_) + " kbps exceeds the latency table range"),
        node(node_),
        arrival_kbps(arrival_kbps_) {}
  int node;
  double arrival_kbps;
};

struct InvalidStepError : Error {
  using Error::Error;
};

// Oracle enumeration would exceed its cap.
struct TooLargeError : Error {
  using Error::Error;
};

struct UndefinedBaselineError : Error {
  using Error::Error;
};

struct GenerationError : Error {
  using Error::Error;
};

// Malformed or inconsistent input files.
struct BadInputError : Error {
  using Error::Error;
};

}  // namespace iotembed
