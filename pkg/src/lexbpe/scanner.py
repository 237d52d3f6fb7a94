"""Longest-match, left-to-right scanner for added and special token surfaces.

Runs on normalized text before pre-tokenization, so multi-word surfaces
(" 1776", "F. Supp. 2d") match atomically anywhere in the text. A match may
not split an alphanumeric run at either edge: the space-prefixed variant
" i" must not claim the start of " increased", and "56" must not claim the
head of "562". Matches whose edges sit on punctuation or whitespace are
unrestricted.
"""

from __future__ import annotations

from dataclasses import dataclass

_LEAF = ""


@dataclass(frozen=True)
class Match:
    start: int
    end: int
    surface: str


def _splits_run(left: str, right: str) -> bool:
    return left.isalnum() and right.isalnum()


class TokenScanner:
    """Character trie over registered surfaces; empty surfaces are rejected."""

    def __init__(self, surfaces: "list[str] | tuple[str, ...]" = ()) -> None:
        self._root: dict = {}
        self._count = 0
        for surface in surfaces:
            self.add(surface)

    def add(self, surface: str) -> None:
        if not surface:
            raise ValueError("cannot register an empty surface")
        node = self._root
        for ch in surface:
            node = node.setdefault(ch, {})
        if _LEAF not in node:
            node[_LEAF] = surface
            self._count += 1

    def __len__(self) -> int:
        return self._count

    def longest_match(self, text: str, pos: int) -> str | None:
        """The longest surface starting at pos whose end edge is valid."""
        if pos > 0 and _splits_run(text[pos - 1], text[pos]):
            return None
        node = self._root
        best: str | None = None
        i = pos
        n = len(text)
        while True:
            leaf = node.get(_LEAF)
            if leaf is not None and (i == n or not _splits_run(text[i - 1], text[i])):
                best = leaf
            if i >= n:
                break
            node = node.get(text[i])
            if node is None:
                break
            i += 1
        return best

    def scan(self, text: str) -> list[Match]:
        """All non-overlapping matches, scanning left to right.

        At each position the longest boundary-valid surface wins; the scan
        resumes after it.
        """
        matches: list[Match] = []
        if not self._root:
            return matches
        pos = 0
        n = len(text)
        root = self._root
        while pos < n:
            if text[pos] not in root:
                pos += 1
                continue
            found = self.longest_match(text, pos)
            if found is None:
                pos += 1
            else:
                matches.append(Match(pos, pos + len(found), found))
                pos += len(found)
        return matches
