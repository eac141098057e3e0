"""Parsing facade over Python 3 source.

Everything downstream (feature extraction, corpus transforms, metrics) goes
through this module instead of touching ``tokenize``/``ast`` directly.  It
provides:

- :func:`tokenize`: a lossless token stream with byte spans,
- :func:`parse`: a typed syntax-tree view (:class:`SyntaxNode`) with byte
  spans that nest properly (decorators are folded into their def/class),
- :func:`apply_edits`: span-based source rewriting,
- :func:`parse_ok`: the parsability predicate.

Spans are offsets into the UTF-8 encoding of the source.  Rewrites are span
edits on the original text, never unparse, so formatting outside the edited
region survives verbatim.
"""

from __future__ import annotations

import ast
import io
import keyword
import tokenize as _std_tokenize
from dataclasses import dataclass, field

__all__ = [
    "Token",
    "Edit",
    "SyntaxNode",
    "SourceMap",
    "LexError",
    "ParseError",
    "tokenize",
    "parse",
    "parse_ast",
    "parse_ok",
    "apply_edits",
    "is_dunder",
]

TOKEN_KINDS = (
    "NAME",
    "KEYWORD",
    "NUMBER",
    "STRING",
    "COMMENT",
    "OP",
    "NEWLINE",
    "INDENT",
    "DEDENT",
    "EOF",
)


class LexError(ValueError):
    """Lexical error; ``offset`` is the byte offset where scanning failed."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


class ParseError(ValueError):
    """Grammar error; carries the 1-based line and byte offset when known."""

    def __init__(self, message: str, lineno: int = 0, offset: int = 0):
        super().__init__(message)
        self.lineno = lineno
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class Edit:
    """Replace ``span`` (half-open byte range of the original) with
    ``replacement``.  A zero-width span is an insertion."""

    span: tuple[int, int]
    replacement: str


@dataclass
class SyntaxNode:
    """One node of the typed tree view.

    ``kind`` is a snake_case tag (module, class_def, function_def, for_stmt,
    list_comp, generator_exp, lambda, decorator, base, attribute, name,
    param, string_stmt, ...).  ``name`` is set for def/class/name/param/
    attribute nodes.  ``binding`` marks name nodes bound by assignment.
    ``documented`` marks module/class_def/function_def nodes whose body opens
    with a string statement.
    """

    kind: str
    span: tuple[int, int]
    children: list["SyntaxNode"] = field(default_factory=list)
    name: str | None = None
    binding: bool = False
    documented: bool = False

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


class SourceMap:
    """Byte-offset arithmetic for one source text.

    ``tokenize`` reports (row, character-column) positions while ``ast``
    reports (row, utf-8 byte column); both are converted here to absolute
    byte offsets into the utf-8 encoding of the text.
    """

    def __init__(self, source: str):
        self.text = source
        self.data = source.encode("utf-8")
        self.lines = source.splitlines(keepends=True)
        starts = [0]
        for line in self.lines:
            starts.append(starts[-1] + len(line.encode("utf-8")))
        self.line_start_bytes = starts

    def from_token_pos(self, pos: tuple[int, int]) -> int:
        row, col = pos
        if row - 1 >= len(self.lines):
            return len(self.data)
        line = self.lines[row - 1]
        return self.line_start_bytes[row - 1] + len(line[:col].encode("utf-8"))

    def from_ast_pos(self, lineno: int, col_offset: int) -> int:
        if lineno - 1 >= len(self.line_start_bytes):
            return len(self.data)
        return self.line_start_bytes[lineno - 1] + col_offset

    def node_span(self, node: ast.AST) -> tuple[int, int]:
        """Byte span of an ast node; decorated defs/classes extend back to
        the first decorator's ``@``."""
        start = self.from_ast_pos(node.lineno, node.col_offset)
        end = self.from_ast_pos(node.end_lineno, node.end_col_offset)
        decorators = getattr(node, "decorator_list", None)
        if decorators:
            first = decorators[0]
            dstart = self.from_ast_pos(first.lineno, first.col_offset)
            at = self.data.rfind(b"@", 0, dstart)
            if at != -1:
                dstart = at
            start = min(start, dstart)
        return (start, end)

    def line_index_of_byte(self, offset: int) -> int:
        """0-based index of the line containing byte ``offset``."""
        lo, hi = 0, len(self.lines) - 1
        if not self.lines:
            return 0
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.line_start_bytes[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def line_start_of_byte(self, offset: int) -> int:
        return self.line_start_bytes[self.line_index_of_byte(offset)]

    def slice(self, span: tuple[int, int]) -> str:
        return self.data[span[0] : span[1]].decode("utf-8")


_KIND_BY_TOKTYPE = {
    _std_tokenize.NAME: "NAME",
    _std_tokenize.NUMBER: "NUMBER",
    _std_tokenize.STRING: "STRING",
    _std_tokenize.COMMENT: "COMMENT",
    _std_tokenize.OP: "OP",
    _std_tokenize.NEWLINE: "NEWLINE",
    _std_tokenize.NL: "NEWLINE",
    _std_tokenize.INDENT: "INDENT",
    _std_tokenize.DEDENT: "DEDENT",
    _std_tokenize.ENDMARKER: "EOF",
}

_FSTRING_START = getattr(_std_tokenize, "FSTRING_START", None)
_FSTRING_END = getattr(_std_tokenize, "FSTRING_END", None)


def tokenize(source: str) -> list[Token]:
    """Full-fidelity token stream, comments included.

    Every non-synthetic token satisfies ``source_bytes[span] == text``, so
    concatenating token texts with the inter-token gaps reproduces the
    source exactly.  Lexical errors raise :class:`LexError`; no partial
    stream is returned.  On interpreters that lex f-strings in pieces, the
    whole f-string is coalesced into one opaque STRING token.
    """
    smap = SourceMap(source)
    out: list[Token] = []
    try:
        raw = list(_std_tokenize.generate_tokens(io.StringIO(source).readline))
    except (_std_tokenize.TokenError, IndentationError, SyntaxError, ValueError) as exc:
        offset = 0
        if isinstance(exc, SyntaxError) and exc.lineno:
            offset = smap.from_token_pos((exc.lineno, max((exc.offset or 1) - 1, 0)))
        else:
            pos = getattr(exc, "args", None)
            if pos and len(pos) > 1 and isinstance(pos[1], tuple):
                offset = smap.from_token_pos(pos[1][:2])
        raise LexError(f"cannot tokenize: {exc}", offset) from exc

    i = 0
    while i < len(raw):
        tok = raw[i]
        if tok.type == _std_tokenize.ENCODING:
            i += 1
            continue
        if tok.type == _std_tokenize.ERRORTOKEN:
            raise LexError(
                f"bad token {tok.string!r}", smap.from_token_pos(tok.start)
            )
        if _FSTRING_START is not None and tok.type == _FSTRING_START:
            depth = 1
            j = i + 1
            while j < len(raw) and depth:
                if raw[j].type == _FSTRING_START:
                    depth += 1
                elif raw[j].type == _FSTRING_END:
                    depth -= 1
                j += 1
            start = smap.from_token_pos(tok.start)
            end = smap.from_token_pos(raw[j - 1].end)
            out.append(Token("STRING", smap.slice((start, end)), (start, end)))
            i = j
            continue
        kind = _KIND_BY_TOKTYPE.get(tok.type)
        if kind is None:
            i += 1
            continue
        if kind == "NAME" and keyword.iskeyword(tok.string):
            kind = "KEYWORD"
        start = smap.from_token_pos(tok.start)
        end = smap.from_token_pos(tok.end)
        if kind == "DEDENT" or (kind in ("NEWLINE", "EOF") and tok.string == ""):
            start = end = smap.from_token_pos(tok.start)
            text = ""
        else:
            text = smap.slice((start, end))
        out.append(Token(kind, text, (start, end)))
        i += 1
    if not out or out[-1].kind != "EOF":
        end = len(smap.data)
        out.append(Token("EOF", "", (end, end)))
    return out


def parse_ast(source: str) -> ast.Module:
    """``ast.parse`` with errors normalized to :class:`ParseError`."""
    try:
        return ast.parse(source)
    except (SyntaxError, ValueError, MemoryError, RecursionError) as exc:
        lineno = getattr(exc, "lineno", 0) or 0
        col = getattr(exc, "offset", 0) or 0
        offset = 0
        if lineno:
            offset = SourceMap(source).from_ast_pos(lineno, max(col - 1, 0))
        raise ParseError(f"cannot parse: {exc}", lineno, offset) from exc


def parse_ok(source: str) -> bool:
    """The parsability predicate: does the Python 3 grammar accept this?"""
    try:
        ast.parse(source)
        return True
    except (SyntaxError, ValueError, MemoryError, RecursionError):
        return False


_NODE_KIND_OVERRIDES = {
    "FunctionDef": "function_def",
    "AsyncFunctionDef": "function_def",
    "ClassDef": "class_def",
    "Module": "module",
    "ListComp": "list_comp",
    "SetComp": "set_comp",
    "DictComp": "dict_comp",
    "GeneratorExp": "generator_exp",
    "Lambda": "lambda",
    "Attribute": "attribute",
    "Name": "name",
    "arg": "param",
    "For": "for_stmt",
    "AsyncFor": "for_stmt",
    "While": "while_stmt",
    "If": "if_stmt",
    "With": "with_stmt",
    "AsyncWith": "with_stmt",
    "Try": "try_stmt",
    "Return": "return_stmt",
    "Assign": "assign",
    "AugAssign": "aug_assign",
    "AnnAssign": "ann_assign",
    "NamedExpr": "named_expr",
    "Expr": "expr_stmt",
    "Call": "call",
    "Constant": "constant",
}


def _kind_of(node: ast.AST) -> str:
    cls = type(node).__name__
    kind = _NODE_KIND_OVERRIDES.get(cls)
    if kind is not None:
        return kind
    out = []
    for ch in cls:
        if ch.isupper() and out:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)


def _is_string_stmt(node: ast.AST) -> bool:
    return (
        isinstance(node, ast.Expr)
        and isinstance(node.value, ast.Constant)
        and isinstance(node.value.value, str)
    )


def _convert(node: ast.AST, smap: SourceMap, parent_span: tuple[int, int]) -> SyntaxNode:
    if isinstance(node, ast.Module):
        span = (0, len(smap.data))
    elif hasattr(node, "lineno"):
        span = smap.node_span(node)
    else:
        span = parent_span

    kind = _kind_of(node)
    name = None
    binding = False
    if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        name = node.name
    elif isinstance(node, ast.Name):
        name = node.id
        binding = isinstance(node.ctx, ast.Store)
    elif isinstance(node, ast.Attribute):
        name = node.attr
    elif isinstance(node, ast.arg):
        name = node.arg
    if _is_string_stmt(node):
        kind = "string_stmt"

    out = SyntaxNode(kind=kind, span=span, name=name, binding=binding)
    if isinstance(node, (ast.Module, ast.ClassDef, ast.FunctionDef, ast.AsyncFunctionDef)):
        out.documented = bool(node.body) and _is_string_stmt(node.body[0])

    decorators = getattr(node, "decorator_list", None) or []
    bases = node.bases if isinstance(node, ast.ClassDef) else []
    for child in ast.iter_child_nodes(node):
        if not (hasattr(child, "lineno") or isinstance(child, (ast.arguments, ast.comprehension))):
            continue
        converted = _convert(child, smap, span)
        if child in decorators:
            out.children.append(
                SyntaxNode("decorator", converted.span, [converted])
            )
        elif child in bases:
            out.children.append(SyntaxNode("base", converted.span, [converted]))
        else:
            out.children.append(converted)
    return out


def parse(source: str) -> SyntaxNode:
    """Parse ``source`` into the typed tree view; raises :class:`ParseError`."""
    tree = parse_ast(source)
    smap = SourceMap(source)
    return _convert(tree, smap, (0, len(smap.data)))


def apply_edits(source: str, edits: list[Edit] | tuple[Edit, ...]) -> str:
    """Apply disjoint span edits; untouched bytes survive verbatim.
    Overlapping spans (including two insertions at the same offset) are an
    error, so the result is independent of application order."""
    data = SourceMap(source).data
    n = len(data)
    ordered = sorted(edits, key=lambda e: (e.span[0], e.span[1]))
    prev_end = -1
    prev_start = -1
    for edit in ordered:
        start, end = edit.span
        if not (0 <= start <= end <= n):
            raise ValueError(f"edit span {edit.span} outside source of {n} bytes")
        if start < prev_end or (start == prev_start and start == end == prev_end):
            raise ValueError(f"overlapping edit spans at byte {start}")
        prev_start, prev_end = start, end
    parts: list[bytes] = []
    cursor = 0
    for edit in ordered:
        start, end = edit.span
        parts.append(data[cursor:start])
        parts.append(edit.replacement.encode("utf-8"))
        cursor = end
    parts.append(data[cursor:])
    return b"".join(parts).decode("utf-8")


def is_dunder(name: str) -> bool:
    return len(name) > 4 and name.startswith("__") and name.endswith("__")
