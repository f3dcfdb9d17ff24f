#pragma once

#include <string>
#include <vector>

namespace vlp_test {

// 10-pair driving-caption fixture. Frozen oracle values for it live in
// the tests that assert them.
inline const std::vector<std::string>& caption_fixture_candidates() {
  static const std::vector<std::string> c = {
      "the car merges right onto the highway because the lane is clear",
      "the car is stopped at the light since the light is red",
      "the car accelerates slowly as traffic begins to move",
      "the car turns left at the intersection to follow the road",
      "the car slows down because a pedestrian is crossing the street",
      "the car keeps straight since the road ahead is empty",
      "the car pulls over to the side because a siren is approaching",
      "the car reverses into the parking spot next to the curb",
      "the car changes to the left lane to pass a slow truck",
      "the car waits at the crosswalk while people walk across",
  };
  return c;
}

inline const std::vector<std::vector<std::string>>& caption_fixture_references() {
  static const std::vector<std::vector<std::string>> r = {
      {"the car merges right onto the highway since its lane is clear",
       "the car is merging right and driving down the highway"},
      {"the car is stopped at the light because the light is red",
       "the car waits at the red light"},
      {"the car accelerates slowly because traffic is moving again"},
      {"the car turns left at the intersection following the road",
       "the car makes a left turn at the crossing"},
      {"the car slows down since a pedestrian crosses the street"},
      {"the car continues straight because the road is empty"},
      {"the car pulls to the side of the road because an emergency vehicle is approaching"},
      {"the car backs into the parking spot by the curb"},
      {"the car moves into the left lane to overtake a slow truck"},
      {"the car waits at the crosswalk while pedestrians cross"},
  };
  return r;
}

}  // namespace vlp_test
