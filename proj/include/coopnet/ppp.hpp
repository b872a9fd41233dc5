#pragma once

#include <cstdint>
#include <vector>

#include "coopnet/rng.hpp"
#include "coopnet/scenario.hpp"

namespace coopnet {

// A finite Poisson point process realization inside a sampling disk.
struct PppRealization {
  std::vector<Position> points;
  Position center{0.0, 0.0};
  double window_radius = 0.0;
};

// Point count ~ Poisson(lambda * pi * radius^2), positions uniform in the
// disk. Deterministic given the stream state.
PppRealization sample_ppp(double lambda, Position center, double radius, RngStream& rng);

// Buffer-reusing variant for hot loops.
void sample_ppp_into(double lambda, Position center, double radius, RngStream& rng,
                     PppRealization& out);

// All random quantities of one time slot: unit-mean exponential fading on
// every signal and interferer link, plus the shared ALOHA indicator of each
// interferer (one indicator per interferer per slot; it multiplies that
// interferer's contribution at the destination and at every relay).
struct SlotDraw {
  double h_sd = 0.0;
  std::vector<double> h_sr;              // per relay
  std::vector<double> h_rd;              // per relay
  std::vector<double> h_to_destination;  // per interferer
  std::vector<double> h_to_relay;        // per interferer x relay, row-major [u * N + k]
  std::vector<std::uint8_t> active;      // ALOHA indicator per interferer
};

SlotDraw draw_slot(const Scenario& scenario, const PppRealization& ppp,
                   const ChannelParams& params, RngStream& rng);

// Buffer-reusing variant for hot loops.
void draw_slot_into(const Scenario& scenario, const PppRealization& ppp,
                    const ChannelParams& params, RngStream& rng, SlotDraw& draw);

}  // namespace coopnet
