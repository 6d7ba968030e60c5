#pragma once

#include <string>
#include <vector>

namespace lctest {

// Expected (station, water body, label) rows of the water-body query, traced
// by hand from the raw fixture files: stations.json for coordinates,
// nominatim/ for each station's address levels and the Q-id attached to
// the addresstype level, wikidata.nt for P206 and labels. The area one
// step above a station's finest level is the one whose Q-id is followed.
// Cells are N-Triples text; "" marks a missing label. Sorted by station,
// then water body.
std::vector<std::vector<std::string>> waterBodyOracle();

}  // namespace lctest
