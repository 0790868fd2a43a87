// Regenerates the JSON documents shipped under data/ from the built-in
// definitions, so the files and the code cannot drift apart.
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "skelact/core/joint_map.hpp"
#include "skelact/core/joint_set.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_data_files OUTPUT_DIR\n";
        return 1;
    }
    const std::string dir = argv[1];

    {
        nlohmann::ordered_json sets = nlohmann::ordered_json::array();
        for (const skelact::JointSet* set :
             {&skelact::ntu25_joint_set(), &skelact::tracker19_joint_set(),
              &skelact::common_joint_set()}) {
            nlohmann::ordered_json doc;
            doc["name"] = set->name();
            doc["joint_names"] = set->joint_names();
            sets.push_back(doc);
        }
        std::ofstream out(dir + "/joint_sets.json");
        out << sets.dump(2) << "\n";
    }
    {
        auto arr = nlohmann::json::array();
        arr.push_back(nlohmann::json::parse(
            skelact::ntu25_to_common_map().to_json_text()));
        arr.push_back(nlohmann::json::parse(
            skelact::tracker19_to_common_map().to_json_text()));
        std::ofstream out(dir + "/joint_maps.json");
        out << arr.dump(2) << "\n";
    }
    return 0;
}
