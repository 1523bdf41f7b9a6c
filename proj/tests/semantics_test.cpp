#include <gtest/gtest.h>

#include "oli/lexer.hpp"
#include "oli/parser.hpp"
#include "oli/semantics.hpp"
#include "test_support.hpp"

using namespace oli;

namespace {

std::vector<Diagnostic> verify_text(const std::string& src) {
    return verify_program(parse_program(tokenize(src, "t.ol"), no_includes(), "t.ol"));
}

std::vector<std::string> messages(const std::vector<Diagnostic>& diags) {
    std::vector<std::string> out;
    for (const auto& d : diags) out.push_back(d.message);
    return out;
}

const char* kIface = R"(
type customer: void { .name: string }
interface I {
  RequestResponse: get_car(customer)(string)
  OneWay: ping(void)
}
)";

} // namespace

TEST(Semantics, CorpusVerifiesCleanly) {
    for (const char* file : {"car_rental/server.ol", "car_rental/server_data.ol", "car_rental/client.ol",
                             "car_rental/client_data.ol", "car_rental/client_combined.ol", "choice/choice_server.ol",
                             "choice/choice_client.ol"}) {
        auto checked = check_program(test::corpus(file));
        EXPECT_TRUE(checked.diagnostics.empty()) << file << ": " << format_diagnostic(checked.diagnostics.front());
    }
}

TEST(Semantics, DuplicateTypeIsReportedOnce) {
    auto checked = check_program(test::corpus("fixtures/dup_types.ol"));
    ASSERT_EQ(checked.diagnostics.size(), 1u);
    EXPECT_TRUE(has_errors(checked.diagnostics));
    EXPECT_EQ(checked.diagnostics[0].loc.line, 5u);
    EXPECT_NE(format_diagnostic(checked.diagnostics[0]).find("error: "), std::string::npos);
}

TEST(Semantics, LinksMustResolveInBothChoiceArms) {
    EXPECT_EQ(messages(verify_text("type a: int | missing")),
              std::vector<std::string>{"link to undeclared type 'missing'"});
    EXPECT_EQ(messages(verify_text("type a: missing | int")).size(), 1u);
    EXPECT_EQ(messages(verify_text("type a: void { .x: int | void { .y: nope } }")).size(), 1u);
    EXPECT_TRUE(verify_text("type a: void { .next?: a }").empty());
}

TEST(Semantics, CardinalityMinimumAboveMaximum) {
    auto d = verify_text("type a: void { .x[5,2]: int }");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NE(d[0].message.find("minimum 5 above maximum 2"), std::string::npos);
}

TEST(Semantics, DuplicateSubtypeInterfaceAndPort) {
    EXPECT_EQ(verify_text("type a: void { .x: int .x: string }").size(), 1u);
    EXPECT_EQ(verify_text("interface I {} interface I {}").size(), 1u);
    EXPECT_EQ(verify_text(std::string(kIface) +
                          "outputPort P { Location: \"socket://h:1\" Interfaces: I } "
                          "outputPort P { Location: \"socket://h:1\" Interfaces: I }")
                  .size(),
              1u);
}

TEST(Semantics, InterfaceOperationTypesMustExist) {
    auto d = verify_text("interface I { RequestResponse: op(nothing)(string) }");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NE(d[0].message.find("unknown type 'nothing'"), std::string::npos);
}

TEST(Semantics, PortsNeedKnownInterfacesAndInputLocations) {
    auto d = verify_text("inputPort In { Interfaces: Nope }");
    EXPECT_EQ(d.size(), 2u);
}

TEST(Semantics, ReceivedOperationsMustBeOffered) {
    std::string deploy = std::string(kIface) + "inputPort In { Location: \"socket://localhost:1\" Interfaces: I }\n";
    EXPECT_TRUE(verify_text(deploy + "main { get_car(r)(s) { s = \"x\" } }").empty());
    EXPECT_EQ(messages(verify_text(deploy + "main { unknown_op(r) }")),
              std::vector<std::string>{"operation 'unknown_op' is not offered by any input port"});
    EXPECT_EQ(verify_text(deploy + "main { get_car(r) }").size(), 1u) << "kind mismatch";
    EXPECT_EQ(verify_text(deploy + "main { [ping(x)] { nullProcess } [get_car(r)] { nullProcess } }").size(), 1u);
}

TEST(Semantics, InvokedOperationsNeedOutputPorts) {
    std::string deploy = std::string(kIface) + "outputPort Out { Location: \"socket://localhost:1\" Interfaces: I }\n";
    EXPECT_TRUE(verify_text(deploy + "main { get_car@Out(c)(r); ping@Out() }").empty());
    EXPECT_EQ(messages(verify_text(deploy + "main { get_car@Nowhere(c)(r) }")),
              std::vector<std::string>{"'Nowhere' is not a declared output port"});
    EXPECT_EQ(verify_text(deploy + "main { missing@Out(c)(r) }").size(), 1u);
    EXPECT_EQ(verify_text(deploy + "main { get_car@Out(c) }").size(), 1u) << "kind mismatch";
}

TEST(Semantics, MatchArmsAndDefines) {
    EXPECT_TRUE(verify_text("type t: int main { match(x) { t { nullProcess } int { nullProcess } } }").empty());
    EXPECT_EQ(messages(verify_text("main { match(x) { ghost { nullProcess } } }")),
              std::vector<std::string>{"match arm names unknown type 'ghost'"});
    EXPECT_EQ(messages(verify_text("main { f }")), std::vector<std::string>{"call to undefined procedure 'f'"});
    EXPECT_TRUE(verify_text("define f { x = 1 } main { f }").empty());
}

TEST(Semantics, EveryProblemIsReported) {
    auto d = verify_text("type a: missing type a: int main { f; match(x) { ghost { g } } }");
    EXPECT_EQ(d.size(), 5u);
    for (const auto& diag : d) EXPECT_EQ(diag.loc.file, "t.ol");
}
