#pragma once

#include <optional>
#include <string>
#include <vector>

namespace invox {

enum class FieldType {
    InvoiceNumber,
    OrderNumber,
    Swift,
    AccountNumber,
    PageNumber,
    InvoiceDate,
    DueDate,
    PaymentDate,
    TotalDue,
    Iban,
    PaymentMethod,
    CompanyName,
    Contacts,
    Address,
    VatNumber,
    Email,
    Website,
    PhoneNumber,
    CompanyId,
    AmountPaid,
};

inline constexpr int kFieldTypeCount = 20;

enum class PartyRole { Seller, Buyer, Delivery, None };

/// One extracted metadata item with its confidence triple and source span.
struct ExtractedField {
    FieldType field = FieldType::InvoiceNumber;
    PartyRole role = PartyRole::None;
    std::string value;
    double key_conf = 0.0;
    double data_conf = 0.0;
    double combine_conf = 0.0;
    int page = 0;
    int block = -1;
    int line = -1;

    bool operator==(const ExtractedField&) const = default;
};

/// Field categories of the extraction workflow. Date and price fields pair
/// keywords with data types; number and general fields may have no data rule.
enum class FieldCategory { Date, Price, Number, General };

/// Per-field extraction recipe: which keyword labels anchor the search,
/// the expected data-type label (empty = none) and whether the field can
/// be recovered from a bare validated data match without a keyword.
struct FieldSpec {
    FieldType field = FieldType::InvoiceNumber;
    std::vector<std::string> keyword_labels;
    std::string expected_data; // datatype label, empty when none
    FieldCategory category = FieldCategory::General;
    bool keyword_required = true;
};

std::string to_string(FieldType f);
std::string to_string(PartyRole r);
std::string to_string(FieldCategory c);
FieldType field_type_from_string(const std::string& s);
PartyRole party_role_from_string(const std::string& s);
FieldCategory field_category_from_string(const std::string& s);

/// The built-in recipes for all twenty field types.
std::vector<FieldSpec> default_field_specs();

} // namespace invox
