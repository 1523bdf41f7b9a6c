#include <gtest/gtest.h>

#include <map>

#include "oli/lexer.hpp"
#include "oli/parser.hpp"
#include "test_support.hpp"

using namespace oli;
using oli::test::corpus;

namespace {

TypeDef type_of(const std::string& src) { return parse_type_definition(tokenize(src)); }
Process proc_of(const std::string& src) { return parse_process(tokenize(src)); }
Expr expr_of(const std::string& src) { return parse_expression(tokenize(src)); }

/// Loader over an in-memory file set.
IncludeLoader memory_loader(std::map<std::string, std::string> files) {
    return [files](const std::string& path, const std::string&) -> IncludedSource {
        auto it = files.find(path);
        if (it == files.end()) throw Error("no such file " + path);
        return {path, tokenize(it->second, path)};
    };
}

} // namespace

TEST(Parser, ProcessDrivenServerHasTwoGuardedBranches) {
    AstProgram p = load_program(corpus("car_rental/server.ol"));
    ASSERT_EQ(p.input_ports.size(), 1u);
    EXPECT_EQ(p.input_ports[0].name, "RentService");
    EXPECT_EQ(p.input_ports[0].location, "socket://localhost:2001");
    EXPECT_EQ(p.input_ports[0].protocol, "sodep");
    EXPECT_EQ(p.execution_mode, ExecutionMode::Concurrent);
    ASSERT_TRUE(p.main_block);
    auto* choice = std::get_if<procs::InputChoice>(&p.main_block->node);
    ASSERT_NE(choice, nullptr);
    ASSERT_EQ(choice->branches.size(), 2u);
    EXPECT_EQ(std::get<procs::RequestResponseRecv>(choice->branches[0].guard).op, "get_car");
    EXPECT_EQ(std::get<procs::RequestResponseRecv>(choice->branches[1].guard).op, "return_car");
}

TEST(Parser, DataDrivenServerBodyIsAMatch) {
    AstProgram p = load_program(corpus("car_rental/server_data.ol"));
    auto& rr = std::get<procs::RequestResponseRecv>(p.main_block->node);
    EXPECT_EQ(rr.op, "process");
    auto& m = std::get<procs::Match>(rr.body->node);
    EXPECT_EQ(m.subject, (Path{"request"}));
    ASSERT_EQ(m.arms.size(), 2u);
    EXPECT_EQ(m.arms[0].type_name, "customer");
    EXPECT_EQ(m.arms[1].type_name, "car_return");
}

TEST(Parser, InterfaceFileDeclaresTheCarRentalTypes) {
    AstProgram p = load_program(corpus("car_rental/client.ol"));
    std::vector<std::string> names;
    for (const auto& t : p.type_decls) names.push_back(t.name);
    EXPECT_EQ(names, (std::vector<std::string>{"customer", "car_return", "request"}));
    auto& car_return = std::get<typedefs::Inline>(p.type_decls[1].def.node);
    ASSERT_EQ(car_return.subtypes.size(), 3u);
    EXPECT_EQ(car_return.subtypes[1].name, "c");
    EXPECT_EQ(car_return.subtypes[1].cardinality, Cardinality::optional());
    EXPECT_EQ(p.includes, (std::vector<std::string>{"carRentInterface.iol", "console.iol"}));
    ASSERT_EQ(p.output_ports.size(), 2u);
    // Included declarations come first, in include order.
    EXPECT_EQ(p.output_ports[0].name, "Console");
    EXPECT_EQ(p.output_ports[1].name, "RentService");
}

TEST(Parser, ChoiceTypesNestToTheRight) {
    TypeDef t = type_of("int | long | string");
    auto& outer = std::get<typedefs::Choice>(t.node);
    EXPECT_EQ(std::get<typedefs::Native>(outer.left->node).native, NativeType::Int);
    auto& inner = std::get<typedefs::Choice>(outer.right->node);
    EXPECT_EQ(std::get<typedefs::Native>(inner.left->node).native, NativeType::Long);
    EXPECT_EQ(std::get<typedefs::Native>(inner.right->node).native, NativeType::String);
}

TEST(Parser, SubtypeChoiceAndCardinalities) {
    TypeDef t = type_of("void { .id: string | int .tags[2,5]: string .extra*: any .opt?: int .many[3,*]: long }");
    auto& inl = std::get<typedefs::Inline>(t.node);
    ASSERT_EQ(inl.subtypes.size(), 5u);
    EXPECT_TRUE(std::holds_alternative<typedefs::Choice>(inl.subtypes[0].def->node));
    EXPECT_EQ(inl.subtypes[1].cardinality, (Cardinality{2, 5}));
    EXPECT_EQ(inl.subtypes[2].cardinality, Cardinality::any_number());
    EXPECT_EQ(inl.subtypes[3].cardinality, Cardinality::optional());
    EXPECT_EQ(inl.subtypes[4].cardinality, (Cardinality{3, std::nullopt}));
}

TEST(Parser, UntypedSubnodesAndUndefined) {
    EXPECT_TRUE(std::holds_alternative<typedefs::UntypedSubnodes>(type_of("any { ? }").node));
    EXPECT_TRUE(std::holds_alternative<typedefs::Undefined>(type_of("undefined").node));
    EXPECT_TRUE(std::holds_alternative<typedefs::Link>(type_of("Old-Software-Corp").node));
}

TEST(Parser, ParallelBindsLooserThanSequence) {
    Process p = proc_of("a = 1; b = 2 | c = 3");
    auto& par = std::get<procs::Parallel>(p.node);
    EXPECT_EQ(std::get<procs::Sequence>(par.left->node).items.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<procs::Assign>(par.right->node));
}

TEST(Parser, InputChoiceGroupsConsecutiveBranches) {
    Process p = proc_of("[a(x)] { nullProcess } [b(y)(z) { z = y }] { w = 1 }; c(q)");
    auto& seq = std::get<procs::Sequence>(p.node);
    ASSERT_EQ(seq.items.size(), 2u);
    auto& choice = std::get<procs::InputChoice>(seq.items[0].node);
    ASSERT_EQ(choice.branches.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<procs::OneWayRecv>(choice.branches[0].guard));
    EXPECT_TRUE(std::holds_alternative<procs::RequestResponseRecv>(choice.branches[1].guard));
    EXPECT_EQ(std::get<procs::OneWayRecv>(seq.items[1].node).op, "c");
}

TEST(Parser, OutputStatements) {
    Process n = proc_of("notify@Out(x.y)");
    auto& note = std::get<procs::Notification>(n.node);
    EXPECT_EQ(note.port, "Out");
    ASSERT_TRUE(note.arg);
    Process s = proc_of("println@Console(\"hi\")()");
    auto& sr = std::get<procs::SolicitResponse>(s.node);
    EXPECT_TRUE(sr.result.empty());
}

TEST(Parser, IfElseChainAndMatch) {
    Process p = proc_of("if (a == 1) { b = 1 } else if (a == 2) { b = 2 } else { b = 3 }");
    auto& i = std::get<procs::If>(p.node);
    ASSERT_TRUE(i.otherwise);
    EXPECT_TRUE(std::holds_alternative<procs::If>((*i.otherwise)->node));

    Process m = proc_of("match(person) { personCCN { r = 1 } personSSN { r = 2 } int { r = 3 } }");
    auto& match = std::get<procs::Match>(m.node);
    ASSERT_EQ(match.arms.size(), 3u);
    EXPECT_EQ(match.arms[2].type_name, "int");
}

TEST(Parser, ExpressionsAreLeftAssociativeAndFoldNegatives) {
    Expr e = expr_of("\"Car id is \" + a + 1");
    auto& outer = std::get<exprs::Binary>(e.node);
    EXPECT_EQ(outer.op, BinaryOp::Add);
    EXPECT_TRUE(std::holds_alternative<exprs::Binary>(outer.lhs->node));

    EXPECT_EQ(std::get<exprs::Literal>(expr_of("-5").node).value, BasicValue{std::int32_t{-5}});
    EXPECT_EQ(std::get<exprs::Literal>(expr_of("-5L").node).value, BasicValue{std::int64_t{-5}});
    EXPECT_EQ(std::get<exprs::Literal>(expr_of("3000000000").node).value, BasicValue{std::int64_t{3000000000}});
    EXPECT_EQ(std::get<exprs::Literal>(expr_of("true").node).value, BasicValue{true});
    EXPECT_TRUE(std::holds_alternative<exprs::IsDefined>(expr_of("is_defined(person.ssn)").node));
    EXPECT_EQ(std::get<exprs::Unary>(expr_of("-x").node).op, UnaryOp::Negate);
}

TEST(Parser, NullProcessAndEmptyBlocks) {
    EXPECT_TRUE(std::holds_alternative<procs::Nil>(proc_of("nullProcess").node));
    AstProgram p = parse_program(tokenize("main { }"), no_includes());
    EXPECT_TRUE(std::holds_alternative<procs::Nil>(p.main_block->node));
}

TEST(Parser, DefinesAndInit) {
    AstProgram p = parse_program(tokenize("init { x = 1 } define f { y = 2 } main { f; f }"), no_includes());
    ASSERT_TRUE(p.init_block);
    ASSERT_EQ(p.defines.count("f"), 1u);
    auto& seq = std::get<procs::Sequence>(p.main_block->node);
    EXPECT_EQ(std::get<procs::CallDefine>(seq.items[0].node).name, "f");
}

TEST(Parser, DuplicateBlocksAreErrors) {
    EXPECT_THROW(parse_program(tokenize("main { a = 1 } main { b = 1 }"), no_includes()), ParseError);
    EXPECT_THROW(parse_program(tokenize("define f { a = 1 } define f { b = 1 }"), no_includes()), ParseError);
}

TEST(Parser, UnbalancedBracesAreErrors) {
    // The data-driven listing as printed, with its request-response bracket unclosed.
    std::string src = R"(main{
  process(request)(response){
  match( request ) {
    customer { response = "43535" }
  }
})";
    EXPECT_THROW(parse_program(tokenize(src), no_includes()), ParseError);
    EXPECT_THROW(parse_program(tokenize("main { a = 1"), no_includes()), ParseError);
}

TEST(Parser, ParseErrorsCarryLocations) {
    try {
        parse_program(tokenize("type t: void {\n  name: string\n}", "t.ol"), no_includes());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.loc().line, 2u);
        EXPECT_EQ(e.loc().column, 3u);
    }
}

TEST(Parser, IncludesSpliceOnceAndDetectCycles) {
    auto loader = memory_loader({
        {"a.iol", "type a: int"},
        {"b.iol", "include \"a.iol\"\ntype b: a"},
        {"loop1.iol", "include \"loop2.iol\""},
        {"loop2.iol", "include \"loop1.iol\""},
        {"behavior.iol", "main { nullProcess }"},
    });
    AstProgram p = parse_program(tokenize("include \"a.iol\" include \"b.iol\" main { nullProcess }"), loader);
    ASSERT_EQ(p.type_decls.size(), 2u);
    EXPECT_EQ(p.type_decls[0].name, "a");
    EXPECT_EQ(p.type_decls[1].name, "b");

    EXPECT_THROW(parse_program(tokenize("include \"loop1.iol\""), loader), IncludeError);
    EXPECT_THROW(parse_program(tokenize("include \"missing.iol\""), loader), IncludeError);
    EXPECT_THROW(parse_program(tokenize("include \"behavior.iol\""), loader), ParseError);
    EXPECT_THROW(parse_program(tokenize("include \"a.iol\""), no_includes()), IncludeError);
}

TEST(Parser, BuiltinConsoleIncludeDeclaresThePort) {
    AstProgram p = oli::test::parse_text("include \"console.iol\"\nmain { println@Console(\"x\")() }");
    ASSERT_EQ(p.output_ports.size(), 1u);
    EXPECT_EQ(p.output_ports[0].location, "local://console");
    ASSERT_EQ(p.interfaces.size(), 1u);
    EXPECT_EQ(p.interfaces[0].request_response_ops[0].name, "println");
}

TEST(Parser, ChoiceCorpusParses) {
    AstProgram p = load_program(corpus("choice/choice_server.ol"));
    std::map<std::string, const TypeDecl*> types;
    for (const auto& t : p.type_decls) types[t.name] = &t;
    ASSERT_TRUE(types.count("numeric"));
    auto& numeric = std::get<typedefs::Choice>(types["numeric"]->def.node);
    EXPECT_EQ(std::get<typedefs::Native>(numeric.left->node).native, NativeType::Int);
    EXPECT_EQ(std::get<typedefs::Native>(numeric.right->node).native, NativeType::Long);
    auto& corp = std::get<typedefs::Choice>(types["corporation"]->def.node);
    EXPECT_EQ(std::get<typedefs::Link>(corp.left->node).name, "Old-Software-Corp");
    EXPECT_EQ(std::get<typedefs::Link>(corp.right->node).name, "New-Software-Corp");
}
