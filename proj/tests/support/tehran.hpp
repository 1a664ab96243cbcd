#pragma once

// The Tehran site as printed in the source figures, plus paths to the shipped
// bundle and fixtures.

#include <string>

namespace tehran {

inline const char* kNetwork = R"(node('Horr Sq.').
node('Hassanabad Sq.').
node('Imam Khomeini RIP Sq.').
node('Saadi Sq.').

link('Horr Sq.','Hassanabad Sq.').
link('Saadi Sq.','Hassanabad Sq.').
link('Imam Khomeini RIP Sq.','Hassanabad Sq.').
link('Saadi Sq.','Imam Khomeini RIP Sq.').

crane(crane_1,big_crane).
crane(crane_2,small_crane).
truck(truck_1,mid_truck).
)";

inline const char* kEvents = R"(police_block('Saadi Sq.','Hassanabad Sq.').
fire('Imam Khomeini RIP Sq.','Hassanabad Sq.').
fire('Saadi Sq.','Imam Khomeini RIP Sq.').
fireman_operation('Saadi Sq.','Imam Khomeini RIP Sq.').
)";

inline const char* kRules = R"(scape_path(X,Y) :- link(X,Y),
                 not fire(X,Y).
scape_path(X,Y) :- link(Y,X),
                 not fire(Y,X).
safe_area(X) :- scape_path(X,_).
)";

inline const char* kHorr = "'Horr Sq.'";
inline const char* kHass = "'Hassanabad Sq.'";
inline const char* kIk = "'Imam Khomeini RIP Sq.'";
inline const char* kSaadi = "'Saadi Sq.'";

inline std::string source_dir() { return RESCUEPLAN_SOURCE_DIR; }
inline std::string bundle_dir() { return source_dir() + "/scenarios/tehran"; }
inline std::string fixture(const std::string& name) { return source_dir() + "/tests/fixtures/" + name; }

}  // namespace tehran
