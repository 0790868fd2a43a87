#pragma once

#include <optional>
#include <string>
#include <vector>

namespace skelact {

// Action class catalogue for one run. Ids are contiguous from 0; names are
// unique. source_dataset_id carries the originating dataset's action number
// (for the recorded classes, the 1-based NTU action id).
class ClassTable {
public:
    struct Entry {
        int class_id = 0;
        std::string name;
        std::optional<int> source_dataset_id;
    };

    ClassTable() = default;
    explicit ClassTable(std::vector<Entry> entries);

    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& name_of(int class_id) const;

    std::optional<int> id_of(const std::string& name) const;
    // Throws DataError listing the unmapped name.
    int require_id(const std::string& name) const;

    std::optional<int> id_of_source(int source_dataset_id) const;

    static ClassTable from_json_text(const std::string& text);
    static ClassTable load(const std::string& path);
    std::string to_json_text() const;

private:
    std::vector<Entry> entries_;
};

}  // namespace skelact
