// Copyright 2026 The civsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Board literals for tests. Tokens, row-major and whitespace separated:
//   .   unowned
//   tK  territory of player K
//   PK  player K standing here

#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "civsim/civ_game.hpp"

namespace civsim::testing {

inline GameState board(int p, const std::string& cells, int move = 0) {
  std::istringstream in(cells);
  std::string tok;
  GameState s;
  s.num_players = p;
  s.move = move;
  while (in >> tok) {
    if (tok == ".") {
      s.board.push_back(Cell::unowned());
    } else if (tok.size() == 2 && tok[0] == 't') {
      s.board.push_back(Cell::territory(tok[1] - '0'));
    } else if (tok.size() == 2 && tok[0] == 'P') {
      s.board.push_back(Cell::occupied(tok[1] - '0'));
    } else {
      throw std::invalid_argument("bad board token " + tok);
    }
  }
  s.board_size = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.board.size()))));
  if (s.board_size * s.board_size != static_cast<int>(s.board.size())) {
    throw std::invalid_argument("board is not square");
  }
  return s;
}

}  // namespace civsim::testing
