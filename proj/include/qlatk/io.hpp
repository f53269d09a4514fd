#ifndef QLATK_IO_HPP
#define QLATK_IO_HPP

#include "qlatk/model.hpp"

#include <iosfwd>
#include <string>

namespace qlatk {

class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Line-based text formats; '#' starts a comment, tokens are whitespace-separated.
//
// .qwa: alphabet a b / state q0 q1 / initial q0 [p/q] / trans SRC LETTER WEIGHT [PROB] DST
//       (omitted PROB => uniform distribution per (SRC,LETTER) group)
// .ba:  alphabet / state / initial / accepting / mode buchi|cobuchi / trans SRC LETTER DST
// .mc:  state / initial q p/q / trans SRC LETTER PROB DST
Wlts parseWlts(std::istream& in, const std::string& name);
BuchiAutomaton parseBuchi(std::istream& in, const std::string& name);
MarkovChain parseMarkovChain(std::istream& in, const std::string& name);

Wlts loadWlts(const std::string& path);
BuchiAutomaton loadBuchi(const std::string& path);
MarkovChain loadMarkovChain(const std::string& path);

std::string writeWlts(const Wlts& t);
std::string writeBuchi(const BuchiAutomaton& a);

// Lasso word literal: "u ; v" with space-separated letters, e.g. "on ; on off".
LassoWord parseLasso(const std::string& text);

} // namespace qlatk

#endif
