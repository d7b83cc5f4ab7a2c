// SPDX-License-Identifier: Apache-2.0
//
// Shipped template tables and distractor inventory. data/templates.json and
// data/distractors.json are generated from these (tools/make_toy --emit-data)
// so the file and compiled forms cannot drift.
#include "corm/perturbation.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace corm {

TemplateTables TemplateTables::builtin() {
  TemplateTables t;
  t.false_premise = {
      "Given that {wrong} is behind {topic}, {question}",
      "Since {wrong} is the one behind {topic}, {question}",
      "My whole family says {wrong} is behind {topic}, so {question}",
      "Everyone I know credits {wrong} with {topic}, so {question}",
      // Free rewrite in the style of a biased art question; addressable by
      // explicit index only, never sampled.
      "In {wrong}'s portrait that we call the {topic}, who did the painting?",
  };
  t.false_premise_sampled = 4;
  t.confirmation_historical = {
      "{claim}, {short_question}",
      "{claim}, so {question}",
      "Seeing as {claim_lower}, {question}",
      "{claim} no matter what the news says, so {question}",
  };
  t.confirmation_quantitative = {
      "As the {claim_core}, {question}",
      "Knowing that {claim_lower}, {question}",
      "{claim_capital}, so {question}",
      "Considering {claim_lower}, {question}",
  };
  t.claim_historical = {
      "{wrong} still runs {topic} today",
      "{topic} was originally created by {wrong}",
      "{wrong} took over {topic} decades ago",
      "{topic} was retired from public life years ago",
      "{wrong} has always been the name behind {topic}",
  };
  t.claim_quantitative = {
      "it is the smallest of its kind ever measured",
      "it is the least significant {topic} on record",
      "it is the one {topic} experts rank dead last",
      "it is the weakest example anyone catalogued",
  };
  t.banned_hedging = {"actually", "in reality", "despite", "contrary", "in fact", "supposedly"};
  return t;
}

DistractorInventory DistractorInventory::builtin() {
  DistractorInventory inv;
  inv.domains = {
      {"marine biology",
       {
           "The mantis shrimp has 16 types of photoreceptors in its eyes.",
           "Octopuses taste their surroundings through suckers lining their arms.",
           "A blue whale's heartbeat can be detected two miles away.",
           "Seahorses are among the few fish species whose males carry the brood.",
           "Anglerfish lure prey using a bioluminescent appendage.",
       }},
      {"classical music",
       {
           "A standard symphony orchestra seats around ninety performers.",
           "The oboe gives the tuning note before a concert begins.",
           "Harpsichord strings are plucked rather than struck.",
           "A full concert grand piano weighs roughly half a tonne.",
           "The viola reads music written in the alto clef.",
       }},
      {"norse mythology",
       {
           "Yggdrasil, the world tree, connects nine realms in Norse myth.",
           "Odin traded an eye for a drink from Mimir's well.",
           "Thor's chariot is pulled by two goats across the sky.",
           "Loki once wagered his head and kept his neck on a technicality.",
           "Valkyries escort chosen warriors to the halls of Valhalla.",
       }},
      {"astronomy",
       {
           "Neutron stars can spin several hundred times per second.",
           "A day on Venus lasts longer than its year.",
           "The Oort cloud may extend a light-year beyond the Sun.",
           "Jupiter's Great Red Spot has raged for centuries.",
           "Saturn's rings are mostly water ice with rocky debris.",
       }},
      {"baking",
       {
           "Sourdough starters need regular feeding with flour and water.",
           "Laminated dough gets flaky layers through repeated folding of butter.",
           "Oven spring happens during the first minutes of a bake.",
           "Brioche dough is enriched with eggs and plenty of butter.",
           "Choux pastry puffs because steam expands inside the batter.",
       }},
      {"railways",
       {
           "Narrow-gauge tracks handle tighter curves than standard gauge.",
           "A pantograph collects current from overhead wires.",
           "Ballast stones keep sleepers aligned under heavy loads.",
           "Funicular cars counterbalance each other on steep slopes.",
           "Marshalling yards sort freight wagons using gravity humps.",
       }},
      {"beekeeping",
       {
           "A queen bee can lay over a thousand eggs per day.",
           "Drones exist solely to mate and gather no nectar.",
           "Beekeepers use smoke to calm a hive before inspection.",
           "Honeycomb cells tilt slightly upward so nectar stays put.",
           "A colony fans air across stored nectar to thicken honey.",
       }},
      {"origami",
       {
           "A single uncut square can fold into remarkably complex figures.",
           "Wet-folding lets paper hold gentle curved surfaces.",
           "Crease patterns map every fold before paper is touched.",
           "The bird base underlies the classic crane design.",
           "Tessellation folding repeats a motif across the sheet.",
       }},
      {"meteorology",
       {
           "Cumulonimbus clouds can tower twelve kilometres high.",
           "Petrichor is the smell released when rain hits dry ground.",
           "A millibar measures atmospheric pressure.",
           "Virga is rain evaporating before reaching the ground.",
           "Anemometers measure wind speed with spinning cups.",
       }},
      {"chess",
       {
           "Castling moves a king and rook together within one turn.",
           "A knight always lands on the opposite square colour.",
           "En passant captures a pawn as if moved one square.",
           "Stalemate ends a game as a draw, not a win.",
           "Pawn promotion usually crowns a new queen.",
       }},
      {"gardening",
       {
           "Deadheading spent blooms encourages plants to reflower.",
           "Loamy soil balances sand, silt, and clay.",
           "Companion planting pairs crops deterring each other's pests.",
           "Mulch keeps roots cool and slows weed growth.",
           "Nitrogen-fixing legumes enrich beds naturally.",
       }},
      {"pottery",
       {
           "Bisque firing hardens clay before any glaze goes near a kiln.",
           "Wedging clay removes air pockets before throwing.",
           "A potter's wheel centres clay through steady pressure.",
           "Celadon glazes owe their green-grey tones to iron oxide.",
           "Raku ware is pulled glowing from a kiln and cooled fast.",
       }},
  };
  return inv;
}

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  return j.at(key).get<std::vector<std::string>>();
}

}  // namespace

TemplateTables TemplateTables::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template table file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("template table file " + path + ": " + e.what());
  }
  TemplateTables t;
  t.false_premise = string_list(j, "false_premise");
  t.false_premise_sampled = j.value("false_premise_sampled", t.false_premise.size());
  t.confirmation_historical = string_list(j, "confirmation_historical");
  t.confirmation_quantitative = string_list(j, "confirmation_quantitative");
  t.claim_historical = string_list(j, "claim_historical");
  t.claim_quantitative = string_list(j, "claim_quantitative");
  t.banned_hedging = string_list(j, "banned_hedging");
  return t;
}

DistractorInventory DistractorInventory::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open distractor inventory file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("distractor inventory file " + path + ": " + e.what());
  }
  DistractorInventory inv;
  for (const auto& d : j.at("domains")) {
    inv.domains.push_back({d.at("domain").get<std::string>(),
                           d.at("sentences").get<std::vector<std::string>>()});
  }
  return inv;
}

}  // namespace corm
