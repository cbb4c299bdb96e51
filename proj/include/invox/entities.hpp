#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "invox/config.hpp"
#include "invox/document.hpp"

namespace invox {

/// Pluggable named-entity annotator. External models register behind this
/// interface by name; the shipped baseline is gazetteer/heuristic based.
class EntityAnnotator {
public:
    virtual ~EntityAnnotator() = default;
    virtual std::string name() const = 0;
    /// Labels drawn from {PERSON, ORGANIZATION, LOCATION, CITY, COUNTRY}.
    virtual std::vector<Annotation> annotate(const Block& block) const = 0;
};

/// Registry so external annotator adapters can be selected from config.
class AnnotatorRegistry {
public:
    static AnnotatorRegistry& instance();
    void register_factory(const std::string& name,
                          std::function<std::shared_ptr<EntityAnnotator>()> factory);
    std::shared_ptr<EntityAnnotator> create(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::function<std::shared_ptr<EntityAnnotator>()>> factories_;
};

/// Case-insensitive word lists backing the baseline annotators.
struct Gazetteer {
    std::set<std::string> first_names;   // folded
    std::set<std::string> cities;        // folded, may be multi-word
    std::set<std::string> countries;     // folded, may be multi-word
    std::set<std::string> legal_suffixes; // folded, e.g. "s.r.o.", "ltd", "gmbh"
    std::set<std::string> street_suffixes; // folded, e.g. "street", "st"

    bool has_first_name(const std::string& token) const;
    bool has_legal_suffix(const std::string& token) const;
    bool has_street_suffix(const std::string& token) const;

    /// Merges word lists of the given languages from dir/<lang>/*.txt.
    static Gazetteer load(const std::string& dir, const std::vector<std::string>& languages);
};

/// Baseline NER: organizations from capitalized runs ending in a legal-form
/// suffix, persons from first-name gazetteer hits, cities and countries from
/// place lists. Matching ignores case, so fully uppercased blocks annotate
/// the same way.
std::vector<Annotation> gazetteer_annotate(const Block& block, const Gazetteer& gaz);

/// Gazetteer-backed EntityAnnotator (registered as "gazetteer").
std::shared_ptr<EntityAnnotator> make_gazetteer_annotator(std::shared_ptr<const Gazetteer> gaz);

/// Address part labels in rank order; earlier entries rank higher when
/// choosing the end line of an address span.
enum class AddressLabel { Country, City, CityDistrict, Suburb, Postcode, Road, HouseNumber, House };

std::string to_string(AddressLabel l);
int address_label_rank(AddressLabel l); // 0 = highest (country)

struct AddressPart {
    AddressLabel label;
    int begin = 0; // code point offsets into the line text
    int end = 0;
};

/// Rule/gazetteer address parser: postcodes by per-country patterns, roads
/// by street suffix or capitalized-token + number/number, house numbers as
/// the numeric tail of a road, cities/countries via the gazetteer.
std::vector<AddressPart> parse_address_parts(const std::string& line_text, const Gazetteer& gaz);

/// Runs parse_address_parts over all block lines, as ADDRESS_PART annotations.
std::vector<Annotation> address_annotate(const Block& block, const Gazetteer& gaz);

/// Location ensemble: ADDRESS_PART annotations survive only when the block
/// holds at least cfg.min_address_items distinct address items across both
/// sources. Span conflicts: NER ORGANIZATION beats address road/house
/// claims; address road beats NER PERSON.
void ensemble_locations(Block& block, const std::vector<Annotation>& ner_annots,
                        const std::vector<Annotation>& addr_annots,
                        const PipelineConfig& cfg);

} // namespace invox
