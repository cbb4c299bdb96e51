#include "invox/fields.hpp"

#include "invox/errors.hpp"

namespace invox {

std::string to_string(FieldType f) {
    switch (f) {
        case FieldType::InvoiceNumber: return "invoice number";
        case FieldType::OrderNumber: return "order number";
        case FieldType::Swift: return "swift";
        case FieldType::AccountNumber: return "account number";
        case FieldType::PageNumber: return "page number";
        case FieldType::InvoiceDate: return "invoice date";
        case FieldType::DueDate: return "due date";
        case FieldType::PaymentDate: return "payment date";
        case FieldType::TotalDue: return "total due";
        case FieldType::Iban: return "iban";
        case FieldType::PaymentMethod: return "payment method";
        case FieldType::CompanyName: return "company name";
        case FieldType::Contacts: return "contacts";
        case FieldType::Address: return "address";
        case FieldType::VatNumber: return "vat number";
        case FieldType::Email: return "email";
        case FieldType::Website: return "website";
        case FieldType::PhoneNumber: return "phone number";
        case FieldType::CompanyId: return "company id";
        case FieldType::AmountPaid: return "amount paid";
    }
    return "invoice number";
}

std::string to_string(PartyRole r) {
    switch (r) {
        case PartyRole::Seller: return "SELLER";
        case PartyRole::Buyer: return "BUYER";
        case PartyRole::Delivery: return "DELIVERY";
        case PartyRole::None: return "NONE";
    }
    return "NONE";
}

std::string to_string(FieldCategory c) {
    switch (c) {
        case FieldCategory::Date: return "DATE";
        case FieldCategory::Price: return "PRICE";
        case FieldCategory::Number: return "NUMBER";
        case FieldCategory::General: return "GENERAL";
    }
    return "GENERAL";
}

FieldType field_type_from_string(const std::string& s) {
    for (int i = 0; i < kFieldTypeCount; ++i) {
        FieldType f = static_cast<FieldType>(i);
        if (to_string(f) == s) return f;
    }
    throw SchemaError("unknown field type: '" + s + "'");
}

PartyRole party_role_from_string(const std::string& s) {
    if (s == "SELLER") return PartyRole::Seller;
    if (s == "BUYER") return PartyRole::Buyer;
    if (s == "DELIVERY") return PartyRole::Delivery;
    if (s == "NONE") return PartyRole::None;
    throw SchemaError("unknown party role: '" + s + "'");
}

FieldCategory field_category_from_string(const std::string& s) {
    if (s == "DATE") return FieldCategory::Date;
    if (s == "PRICE") return FieldCategory::Price;
    if (s == "NUMBER") return FieldCategory::Number;
    if (s == "GENERAL") return FieldCategory::General;
    throw SchemaError("unknown field category: '" + s + "'");
}

std::vector<FieldSpec> default_field_specs() {
    using FC = FieldCategory;
    std::vector<FieldSpec> specs;
    auto add = [&](FieldType f, std::vector<std::string> kws, std::string data, FC cat,
                   bool kw_required) {
        specs.push_back(FieldSpec{f, std::move(kws), std::move(data), cat, kw_required});
    };
    add(FieldType::InvoiceNumber, {"INVOICE NUMBER"}, "NUMBER", FC::Number, true);
    add(FieldType::OrderNumber, {"ORDER NUMBER"}, "NUMBER", FC::Number, true);
    add(FieldType::InvoiceDate, {"INVOICE DATE"}, "DATE", FC::Date, true);
    add(FieldType::DueDate, {"DUE DATE"}, "DATE", FC::Date, true);
    add(FieldType::PaymentDate, {"PAYMENT DATE"}, "DATE", FC::Date, true);
    add(FieldType::TotalDue, {"TOTAL DUE"}, "PRICE", FC::Price, true);
    add(FieldType::AmountPaid, {"AMOUNT PAID"}, "PRICE", FC::Price, true);
    add(FieldType::PaymentMethod, {"PAYMENT METHOD"}, "", FC::General, true);
    add(FieldType::Swift, {"SWIFT"}, "SWIFT", FC::General, true);
    add(FieldType::AccountNumber, {"ACCOUNT NUMBER"}, "ACCOUNT NUMBER", FC::General, true);
    // unique structured information, recoverable without a keyword
    add(FieldType::VatNumber, {"VAT NUMBER"}, "VAT NUMBER", FC::General, false);
    add(FieldType::Iban, {"IBAN"}, "IBAN", FC::General, false);
    add(FieldType::CompanyId, {"COMPANY ID"}, "COMPANY ID", FC::General, false);
    add(FieldType::PageNumber, {"PAGE NUMBER"}, "PAGE NUMBER", FC::Number, false);
    add(FieldType::Email, {"EMAIL"}, "EMAIL", FC::General, false);
    add(FieldType::Website, {"WEBSITE"}, "URL", FC::General, false);
    add(FieldType::PhoneNumber, {"PHONE NUMBER"}, "PHONE", FC::General, true);
    return specs;
}

} // namespace invox
