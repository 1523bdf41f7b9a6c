#include "oli/optimizer.hpp"

namespace oli {
namespace {

void optimize_in_place(Process& p);

void optimize_box(Box<Process>& b) { optimize_in_place(*b); }

void flatten_into(std::vector<Process>& out, Process&& item) {
    if (auto* seq = std::get_if<procs::Sequence>(&item.node)) {
        for (auto& inner : seq->items) flatten_into(out, std::move(inner));
        return;
    }
    if (std::holds_alternative<procs::Nil>(item.node)) return;
    out.push_back(std::move(item));
}

void optimize_in_place(Process& p) {
    std::visit(Overloaded{
                   [&](procs::Sequence& s) {
                       for (auto& item : s.items) optimize_in_place(item);
                       std::vector<Process> flat;
                       for (auto& item : s.items) flatten_into(flat, std::move(item));
                       s.items = std::move(flat);
                   },
                   [](procs::Parallel& par) {
                       optimize_box(par.left);
                       optimize_box(par.right);
                   },
                   [](procs::InputChoice& c) {
                       for (auto& br : c.branches) {
                           if (auto* rr = std::get_if<procs::RequestResponseRecv>(&br.guard))
                               optimize_box(rr->body);
                           optimize_box(br.body);
                       }
                   },
                   [](procs::RequestResponseRecv& rr) { optimize_box(rr.body); },
                   [](procs::If& i) {
                       optimize_box(i.then);
                       if (i.otherwise) optimize_box(*i.otherwise);
                   },
                   [](procs::Match& m) {
                       for (auto& arm : m.arms) optimize_box(arm.body);
                   },
                   [](auto&) {},
               },
               p.node);
    if (auto* s = std::get_if<procs::Sequence>(&p.node); s && s->items.empty())
        p.node = procs::Nil{};
}

} // namespace

Process optimize_process(Process process) {
    optimize_in_place(process);
    return process;
}

AstProgram optimize_ast(AstProgram program) {
    if (program.init_block) optimize_in_place(*program.init_block);
    if (program.main_block) optimize_in_place(*program.main_block);
    for (auto& [name, body] : program.defines) optimize_in_place(body);
    return program;
}

} // namespace oli
